#include "maxstab/config.hpp"

#include <filesystem>

#include "maxstab/errors.hpp"
#include "maxstab/io.hpp"

namespace maxstab {

Grid GridSpec::make() const {
    if (dim == 1)
        return lattice ? Grid::lattice1d(static_cast<long>(radius))
                       : Grid::continuous1d(radius, spacing);
    if (dim == 2)
        return lattice ? Grid::lattice2d(static_cast<long>(radius))
                       : Grid::continuous2d(radius, spacing);
    throw ConfigError("grid.dim: must be 1 or 2");
}

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& why) {
    throw ConfigError("config field '" + path + "': " + why);
}

template <typename T>
T get_or(const nlohmann::json& j, const std::string& key, const std::string& path, T fallback) {
    if (!j.contains(key)) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
        fail(path + "." + key, "wrong type");
    }
}

template <typename T>
T require(const nlohmann::json& j, const std::string& key, const std::string& path) {
    if (!j.contains(key)) fail(path + "." + key, "missing");
    try {
        return j.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
        fail(path + "." + key, "wrong type");
    }
}

} // namespace

SpectralModel model_from_json(const nlohmann::json& j, const std::string& path) {
    if (!j.is_object()) fail(path, "must be an object");
    const std::string kind = require<std::string>(j, "kind", path);
    try {
        if (kind == "constant")
            return SpectralModel::constant(get_or<double>(j, "level", path, 1.0));
        if (kind == "brown_resnick") {
            const std::string sampler = get_or<std::string>(j, "sampler", path, "series");
            if (sampler != "series" && sampler != "cholesky")
                fail(path + ".sampler", "must be 'series' or 'cholesky'");
            return SpectralModel::brown_resnick(
                get_or<int>(j, "truncation", path, 40),
                sampler == "series" ? BrSampler::series : BrSampler::cholesky);
        }
        if (kind == "compact_bump") {
            const std::string shape = get_or<std::string>(j, "shape", path, "triangular");
            if (shape != "triangular" && shape != "box")
                fail(path + ".shape", "must be 'triangular' or 'box'");
            return SpectralModel::compact_bump(
                shape == "triangular" ? BumpKind::triangular : BumpKind::box,
                get_or<double>(j, "support_radius", path, 1.0),
                get_or<double>(j, "height", path, 1.0));
        }
        if (kind == "comb")
            return SpectralModel::comb(get_or<long>(j, "n_bumps", path, 0));
        if (kind == "mixture") {
            if (!j.contains("weights") || !j.contains("parts"))
                fail(path, "mixture needs 'weights' and 'parts'");
            std::vector<double> weights = require<std::vector<double>>(j, "weights", path);
            std::vector<SpectralModel> parts;
            const auto& arr = j.at("parts");
            if (!arr.is_array()) fail(path + ".parts", "must be an array");
            for (std::size_t i = 0; i < arr.size(); ++i)
                parts.push_back(
                    model_from_json(arr[i], path + ".parts[" + std::to_string(i) + "]"));
            return SpectralModel::mixture(std::move(weights), std::move(parts));
        }
    } catch (const std::invalid_argument& e) {
        fail(path, e.what());
    }
    fail(path + ".kind", "unknown model kind '" + kind + "'");
}

nlohmann::json model_to_json(const SpectralModel& model) {
    nlohmann::json j;
    std::visit(
        [&](const auto& m) {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, ConstantModel>) {
                j["kind"] = "constant";
                j["level"] = m.level;
            } else if constexpr (std::is_same_v<T, BrownResnickModel>) {
                j["kind"] = "brown_resnick";
                j["truncation"] = m.truncation;
                j["sampler"] = m.sampler == BrSampler::series ? "series" : "cholesky";
            } else if constexpr (std::is_same_v<T, CompactBumpModel>) {
                j["kind"] = "compact_bump";
                j["shape"] = m.kind == BumpKind::triangular ? "triangular" : "box";
                j["support_radius"] = m.support_radius;
                j["height"] = m.height;
            } else if constexpr (std::is_same_v<T, CombModel>) {
                j["kind"] = "comb";
                j["n_bumps"] = m.n_bumps;
            } else {
                j["kind"] = "mixture";
                j["weights"] = m.weights;
                nlohmann::json parts = nlohmann::json::array();
                for (const auto& p : m.parts) parts.push_back(model_to_json(p));
                j["parts"] = std::move(parts);
            }
        },
        model.variant);
    return j;
}

RunConfig parse_run_config(const nlohmann::json& j) {
    if (!j.is_object()) throw ConfigError("config root: must be a JSON object");
    RunConfig cfg;

    if (!j.contains("model")) throw ConfigError("config field 'model': missing");
    cfg.model = model_from_json(j.at("model"), "model");

    if (j.contains("grid")) {
        const auto& g = j.at("grid");
        cfg.grid.dim = get_or<int>(g, "dim", "grid", cfg.grid.dim);
        if (cfg.grid.dim != 1 && cfg.grid.dim != 2) fail("grid.dim", "must be 1 or 2");
        const std::string type = get_or<std::string>(g, "type", "grid",
                                                     cfg.grid.lattice ? "lattice" : "continuous");
        if (type != "lattice" && type != "continuous")
            fail("grid.type", "must be 'lattice' or 'continuous'");
        cfg.grid.lattice = type == "lattice";
        cfg.grid.spacing = get_or<double>(g, "spacing", "grid",
                                          cfg.grid.lattice ? 1.0 : cfg.grid.spacing);
        if (cfg.grid.lattice && cfg.grid.spacing != 1.0)
            fail("grid.spacing", "lattice grids have spacing 1");
        if (!(cfg.grid.spacing > 0.0)) fail("grid.spacing", "must be > 0");
        cfg.grid.radius = get_or<double>(g, "radius", "grid", cfg.grid.radius);
        if (!(cfg.grid.radius > 0.0)) fail("grid.radius", "must be > 0");
        cfg.grid.padding = get_or<double>(g, "padding", "grid", cfg.grid.padding);
        if (cfg.grid.padding < 0.0) fail("grid.padding", "must be >= 0");
    } else if (cfg.grid.lattice) {
        cfg.grid.spacing = 1.0;
    }

    if (j.contains("simulation")) {
        const auto& s = j.at("simulation");
        const std::string field = get_or<std::string>(s, "field", "simulation", "dehaan");
        if (field != "dehaan" && field != "m3")
            fail("simulation.field", "must be 'dehaan' or 'm3'");
        cfg.sim.field = field == "dehaan" ? FieldKind::dehaan : FieldKind::m3;
        const std::string mode = get_or<std::string>(s, "mode", "simulation", "fixed_n");
        if (mode != "fixed_n" && mode != "threshold")
            fail("simulation.mode", "must be 'fixed_n' or 'threshold'");
        cfg.sim.mode = mode == "fixed_n" ? Truncation::Mode::fixed_n
                                         : Truncation::Mode::threshold;
        cfg.sim.n_atoms = get_or<std::size_t>(s, "n_atoms", "simulation", cfg.sim.n_atoms);
        if (cfg.sim.mode == Truncation::Mode::fixed_n && cfg.sim.n_atoms < 1)
            fail("simulation.n_atoms", "must be >= 1 in fixed_n mode");
        if (s.contains("sup_bound"))
            cfg.sim.sup_bound = require<double>(s, "sup_bound", "simulation");
        cfg.sim.n_reps = get_or<std::size_t>(s, "n_reps", "simulation", cfg.sim.n_reps);
        if (cfg.sim.n_reps == 0) fail("simulation.n_reps", "empty run");
        cfg.sim.atom_log_cap =
            get_or<std::size_t>(s, "atom_log_cap", "simulation", cfg.sim.atom_log_cap);
        cfg.sim.save_fields =
            get_or<std::size_t>(s, "save_fields", "simulation", cfg.sim.save_fields);
    }

    if (j.contains("classifier")) {
        const auto& c = j.at("classifier");
        cfg.classifier.thresholds.eps_rel =
            get_or<double>(c, "eps_rel", "classifier", cfg.classifier.thresholds.eps_rel);
        cfg.classifier.thresholds.eps_abs =
            get_or<double>(c, "eps_abs", "classifier", cfg.classifier.thresholds.eps_abs);
        cfg.classifier.thresholds.growth_window = get_or<int>(
            c, "growth_window", "classifier", cfg.classifier.thresholds.growth_window);
        cfg.classifier.thresholds.floor =
            get_or<double>(c, "floor", "classifier", cfg.classifier.thresholds.floor);
        cfg.classifier.radii =
            get_or<std::vector<double>>(c, "radii", "classifier", cfg.classifier.radii);
        cfg.classifier.weighted =
            get_or<bool>(c, "weighted", "classifier", cfg.classifier.weighted);
        if (cfg.classifier.thresholds.growth_window < 1)
            fail("classifier.growth_window", "must be >= 1");
    }

    if (j.contains("diagnostics")) {
        const auto& d = j.at("diagnostics");
        cfg.diag.lags = get_or<std::vector<double>>(d, "lags", "diagnostics", cfg.diag.lags);
        cfg.diag.radii = get_or<std::vector<double>>(d, "radii", "diagnostics", cfg.diag.radii);
        cfg.diag.z_values =
            get_or<std::vector<double>>(d, "z_values", "diagnostics", cfg.diag.z_values);
        cfg.diag.delta_sweep =
            get_or<std::vector<double>>(d, "delta_sweep", "diagnostics", cfg.diag.delta_sweep);
        cfg.diag.subwindow = get_or<double>(d, "subwindow", "diagnostics", cfg.diag.subwindow);
        cfg.diag.identity_lags = get_or<std::vector<double>>(d, "identity_lags", "diagnostics",
                                                             cfg.diag.identity_lags);
        cfg.diag.identity_atoms =
            get_or<std::size_t>(d, "identity_atoms", "diagnostics", cfg.diag.identity_atoms);
        if (!(cfg.diag.subwindow > 0.0)) fail("diagnostics.subwindow", "must be > 0");
    }

    cfg.seed = get_or<std::uint64_t>(j, "seed", "", cfg.seed);
    cfg.threads = get_or<unsigned>(j, "threads", "", cfg.threads);
    if (cfg.threads == 0) cfg.threads = 1;
    cfg.out_dir = get_or<std::string>(j, "out_dir", "", cfg.out_dir);
    return cfg;
}

RunConfig load_run_config(const std::string& path) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(read_text_file(path));
    } catch (const DataError& e) {
        throw ConfigError(std::string("config file: ") + e.what());
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("config file '" + path + "': invalid JSON: " + e.what());
    }
    return parse_run_config(j);
}

nlohmann::json effective_config_json(const RunConfig& cfg) {
    nlohmann::json j;
    j["schema_version"] = kSchemaVersion;
    j["model"] = model_to_json(cfg.model);
    j["grid"] = {{"dim", cfg.grid.dim},
                 {"type", cfg.grid.lattice ? "lattice" : "continuous"},
                 {"spacing", cfg.grid.spacing},
                 {"radius", cfg.grid.radius},
                 {"padding", cfg.grid.padding}};
    nlohmann::json sim = {{"field", cfg.sim.field == FieldKind::dehaan ? "dehaan" : "m3"},
                          {"mode", cfg.sim.mode == Truncation::Mode::fixed_n ? "fixed_n"
                                                                             : "threshold"},
                          {"n_atoms", cfg.sim.n_atoms},
                          {"n_reps", cfg.sim.n_reps},
                          {"atom_log_cap", cfg.sim.atom_log_cap},
                          {"save_fields", cfg.sim.save_fields}};
    if (cfg.sim.sup_bound) sim["sup_bound"] = *cfg.sim.sup_bound;
    j["simulation"] = std::move(sim);
    j["classifier"] = {{"eps_rel", cfg.classifier.thresholds.eps_rel},
                       {"eps_abs", cfg.classifier.thresholds.eps_abs},
                       {"growth_window", cfg.classifier.thresholds.growth_window},
                       {"floor", cfg.classifier.thresholds.floor},
                       {"radii", cfg.classifier.radii},
                       {"weighted", cfg.classifier.weighted}};
    j["diagnostics"] = {{"lags", cfg.diag.lags},
                        {"radii", cfg.diag.radii},
                        {"z_values", cfg.diag.z_values},
                        {"delta_sweep", cfg.diag.delta_sweep},
                        {"subwindow", cfg.diag.subwindow},
                        {"identity_lags", cfg.diag.identity_lags},
                        {"identity_atoms", cfg.diag.identity_atoms}};
    j["seed"] = cfg.seed;
    j["threads"] = cfg.threads;
    j["out_dir"] = cfg.out_dir;
    return j;
}

nlohmann::json RunManifest::to_json() const {
    nlohmann::json j;
    j["schema_version"] = kSchemaVersion;
    j["kind"] = "manifest";
    j["toolkit_version"] = toolkit_version;
    j["command"] = command;
    j["config_hash"] = config_hash;
    j["wall_seconds"] = wall_seconds;
    j["effective_config"] = effective_config;
    j["truncation_exact"] = truncation_exact;
    j["atom_log_complete"] = atom_log_complete;
    nlohmann::json files = nlohmann::json::array();
    for (const auto& e : outputs)
        files.push_back({{"path", e.path}, {"bytes", e.bytes}, {"digest", e.digest}});
    j["outputs"] = std::move(files);
    return j;
}

OutputWriter::OutputWriter(std::string dir) : dir_(std::move(dir)) {
    std::error_code ec;
    std::filesystem::create_directories(dir_, ec);
    if (ec) throw DataError("cannot create output directory '" + dir_ + "': " + ec.message());
}

void OutputWriter::write(const std::string& name, const std::string& content) {
    const std::string path = dir_ + "/" + name;
    write_text_file(path, content);
    entries_.push_back({name, content.size(), fnv1a64_hex(content)});
}

void OutputWriter::write_json(const std::string& name, const nlohmann::json& j) {
    write(name, j.dump(2) + "\n");
}

} // namespace maxstab
