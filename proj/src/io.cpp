#include "maxstab/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "maxstab/errors.hpp"

namespace maxstab {

std::uint64_t fnv1a64(const std::string& bytes) {
    std::uint64_t hash = 0xcbf29ce484222325ull;
    for (unsigned char c : bytes) {
        hash ^= static_cast<std::uint64_t>(c);
        hash *= 0x100000001b3ull;
    }
    return hash;
}

std::string fnv1a64_hex(const std::string& bytes) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(fnv1a64(bytes)));
    return buf;
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot open for writing: " + path);
    out << content;
    if (!out) throw DataError("write failed: " + path);
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

namespace {

std::string num(double x) {
    if (!std::isfinite(x)) return x > 0 ? "inf" : (x < 0 ? "-inf" : "nan");
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

double json_finite(double x) {
    // JSON has no inf; artifacts carry null instead of losing the row
    return x;
}

void push_number_or_null(nlohmann::json& arr, double x) {
    if (std::isfinite(x)) arr.push_back(x);
    else arr.push_back(nullptr);
}

} // namespace

std::string field_to_csv(const MaxStableField& field) {
    std::ostringstream out;
    const Grid& g = field.grid;
    if (g.dim == 1) {
        out << "x,value\n";
        for (long i = g.lo[0]; i <= g.hi[0]; ++i)
            out << num(g.coord(i)) << ',' << num(field.values[g.flat(i)]) << '\n';
    } else {
        out << "x,y,value\n";
        for (long i = g.lo[0]; i <= g.hi[0]; ++i)
            for (long j = g.lo[1]; j <= g.hi[1]; ++j)
                out << num(g.coord(i)) << ',' << num(g.coord(j)) << ','
                    << num(field.values[g.flat(i, j)]) << '\n';
    }
    return out.str();
}

std::string curve_to_csv(const std::vector<LagEstimate>& curve) {
    std::ostringstream out;
    out << "lag,mean,se\n";
    for (const auto& p : curve)
        out << num(p.lag) << ',' << num(p.mean) << ',' << num(p.se) << '\n';
    return out.str();
}

std::string cesaro_to_csv(const CesaroCurve& curve) {
    std::ostringstream out;
    out << "r,mean_cesaro,median_A,decile_lo,decile_hi\n";
    for (std::size_t k = 0; k < curve.radii.size(); ++k)
        out << num(curve.radii[k]) << ',' << num(curve.mean_curve[k]) << ','
            << num(curve.median_A[k]) << ',' << num(curve.decile_lo[k]) << ','
            << num(curve.decile_hi[k]) << '\n';
    return out.str();
}

std::string theta_to_csv(const std::vector<ThetaEstimate>& thetas) {
    std::ostringstream out;
    out << "z,theta,theta_lo,theta_hi,usable\n";
    for (const auto& t : thetas)
        out << num(t.z) << ',' << num(t.theta) << ',' << num(t.theta_lo) << ','
            << num(t.theta_hi) << ',' << (t.usable ? 1 : 0) << '\n';
    return out.str();
}

std::string tail_to_csv(const std::vector<MixingCell>& cells) {
    std::ostringstream out;
    out << "lag,delta,p,wilson_lo,wilson_hi\n";
    for (const auto& c : cells)
        out << num(c.lag) << ',' << num(c.delta) << ',' << num(c.p) << ','
            << num(c.wilson.lo) << ',' << num(c.wilson.hi) << '\n';
    return out.str();
}

nlohmann::json grid_to_json(const Grid& grid) {
    nlohmann::json j;
    j["dim"] = grid.dim;
    j["type"] = grid.lattice ? "lattice" : "continuous";
    j["spacing"] = grid.spacing;
    j["lo"] = {grid.lo[0], grid.lo[1]};
    j["hi"] = {grid.hi[0], grid.hi[1]};
    return j;
}

Grid grid_from_json(const nlohmann::json& j) {
    Grid g;
    g.dim = j.at("dim").get<int>();
    g.lattice = j.at("type").get<std::string>() == "lattice";
    g.spacing = j.at("spacing").get<double>();
    const auto lo = j.at("lo");
    const auto hi = j.at("hi");
    g.lo = {lo.at(0).get<long>(), lo.at(1).get<long>()};
    g.hi = {hi.at(0).get<long>(), hi.at(1).get<long>()};
    return g;
}

nlohmann::json field_to_json(const MaxStableField& field, bool include_atoms) {
    nlohmann::json j;
    j["schema_version"] = kSchemaVersion;
    j["kind"] = "field";
    j["grid"] = grid_to_json(field.grid);
    j["truncation"] = {
        {"mode", field.truncation.mode == Truncation::Mode::fixed_n ? "fixed_n" : "threshold"},
        {"n_used", field.truncation.n_used},
        {"exact", field.truncation.exact},
        {"atom_log_complete", field.truncation.atom_log_complete}};
    j["values"] = field.values;
    if (include_atoms) {
        nlohmann::json atoms = nlohmann::json::array();
        for (const auto& atom : field.atoms) {
            nlohmann::json a;
            a["u"] = atom.u;
            if (atom.origin) a["origin"] = {(*atom.origin)[0], (*atom.origin)[1]};
            if (atom.hopf_label) a["hopf"] = to_string(*atom.hopf_label);
            if (atom.neveu_label) a["neveu"] = to_string(*atom.neveu_label);
            a["values"] = atom.path.values;
            atoms.push_back(std::move(a));
        }
        j["atoms"] = std::move(atoms);
    }
    return j;
}

nlohmann::json verdict_to_json(const ConeVerdict& verdict, bool include_trace) {
    nlohmann::json j;
    j["axis"] = to_string(verdict.axis);
    j["test"] = to_string(verdict.test);
    j["label"] = to_string(verdict.label);
    j["path_sup"] = verdict.path_sup;
    j["thresholds"] = {{"eps_rel", verdict.thresholds.eps_rel},
                       {"eps_abs", verdict.thresholds.eps_abs},
                       {"growth_window", verdict.thresholds.growth_window},
                       {"floor", verdict.thresholds.floor}};
    if (!verdict.note.empty()) j["note"] = verdict.note;
    if (include_trace) {
        nlohmann::json rows = nlohmann::json::array();
        for (const auto& row : verdict.trace)
            rows.push_back({{"r", row.r},
                            {"I", row.integral},
                            {"A", row.cesaro},
                            {"s", row.annulus_sup}});
        j["trace"] = std::move(rows);
    }
    return j;
}

nlohmann::json classification_to_json(const PathClassification& cls, bool include_trace) {
    nlohmann::json j;
    j["hopf_integral"] = verdict_to_json(cls.hopf_integral, include_trace);
    j["hopf_decay"] = verdict_to_json(cls.hopf_decay, include_trace);
    j["neveu_cesaro"] = verdict_to_json(cls.neveu_cesaro, include_trace);
    if (cls.sup_local) j["sup_local"] = verdict_to_json(*cls.sup_local, include_trace);
    if (cls.weighted) j["weighted"] = verdict_to_json(*cls.weighted, include_trace);
    j["conflict"] = cls.conflict();
    return j;
}

nlohmann::json m3_atoms_to_json(const M3Extraction& extraction) {
    nlohmann::json j;
    j["schema_version"] = kSchemaVersion;
    j["kind"] = "m3_atoms";
    j["boundary_excluded"] = extraction.boundary_excluded;
    nlohmann::json atoms = nlohmann::json::array();
    for (const auto& atom : extraction.atoms) {
        nlohmann::json a;
        a["x"] = {atom.x[0], atom.x[1]};
        a["v"] = atom.v;
        a["z_grid"] = grid_to_json(atom.z.grid);
        a["z_values"] = atom.z.values;
        atoms.push_back(std::move(a));
    }
    j["atoms"] = std::move(atoms);
    return j;
}

nlohmann::json report_to_json(const DiagnosticReport& report) {
    nlohmann::json j;
    j["schema_version"] = kSchemaVersion;
    j["kind"] = "diagnostic_report";
    j["model"] = report.model_name;

    nlohmann::json curve = nlohmann::json::array();
    for (const auto& p : report.min_expectation)
        curve.push_back({{"lag", p.lag}, {"mean", p.mean}, {"se", p.se}});
    j["min_expectation"] = std::move(curve);

    nlohmann::json idents = nlohmann::json::array();
    for (const auto& e : report.identity)
        idents.push_back({{"lag", e.lag},
                          {"lhs", e.lhs},
                          {"lhs_se", e.lhs_se},
                          {"rhs", e.rhs},
                          {"rhs_se", e.rhs_se},
                          {"gap", e.gap},
                          {"pooled_se", e.pooled_se},
                          {"n_reps", e.n_reps},
                          {"exact_fields", e.exact_fields}});
    j["identity"] = std::move(idents);

    j["cesaro"] = {{"radii", report.cesaro.radii},
                   {"mean_curve", report.cesaro.mean_curve},
                   {"median_A", report.cesaro.median_A},
                   {"decile_lo", report.cesaro.decile_lo},
                   {"decile_hi", report.cesaro.decile_hi},
                   {"n_reps", report.cesaro.n_reps}};

    nlohmann::json thetas = nlohmann::json::array();
    for (const auto& t : report.theta) {
        nlohmann::json row;
        row["z"] = t.z;
        nlohmann::json tv = nlohmann::json::array();
        push_number_or_null(tv, json_finite(t.theta));
        push_number_or_null(tv, t.theta_lo);
        push_number_or_null(tv, t.theta_hi);
        row["theta"] = tv[0];
        row["theta_lo"] = tv[1];
        row["theta_hi"] = tv[2];
        row["usable"] = t.usable;
        row["p_wilson"] = {t.wilson.lo, t.wilson.hi};
        thetas.push_back(std::move(row));
    }
    j["theta"] = std::move(thetas);

    nlohmann::json tail = nlohmann::json::array();
    for (const auto& c : report.tail)
        tail.push_back({{"lag", c.lag},
                        {"delta", c.delta},
                        {"p", c.p},
                        {"wilson", {c.wilson.lo, c.wilson.hi}}});
    j["tail"] = std::move(tail);

    j["verdicts"] = {{"ergodic", to_string(report.verdicts.ergodic)},
                     {"mixing", to_string(report.verdicts.mixing)},
                     {"m3", to_string(report.verdicts.m3)},
                     {"conflict", report.verdicts.conflict},
                     {"evidence", report.verdicts.evidence}};

    j["provenance"] = {{"seed", report.seed},
                       {"n_reps", report.n_reps},
                       {"truncation_exact", report.truncation_exact}};
    return j;
}

} // namespace maxstab
