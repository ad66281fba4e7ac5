#include "maxstab/runner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <sstream>

#include "maxstab/errors.hpp"
#include "maxstab/io.hpp"
#include "maxstab/parallel.hpp"

namespace maxstab {

namespace {

constexpr std::uint64_t kSimulateTag = 0x01;
constexpr std::uint64_t kClassifyTag = 0x02;
constexpr std::uint64_t kDiagnoseTag = 0x04;

struct Timer {
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
};

std::string zero_pad(std::size_t n) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%03zu", n);
    return buf;
}

RunManifest finalize(OutputWriter& writer, const RunConfig& cfg, const std::string& command,
                     const Timer& timer, bool truncation_exact, bool atom_log_complete) {
    RunManifest manifest;
    manifest.toolkit_version = kToolkitVersion;
    manifest.command = command;
    manifest.effective_config = effective_config_json(cfg);
    manifest.config_hash = fnv1a64_hex(manifest.effective_config.dump());
    manifest.outputs = writer.entries();
    manifest.truncation_exact = truncation_exact;
    manifest.atom_log_complete = atom_log_complete;
    manifest.wall_seconds = timer.seconds();
    write_text_file(writer.dir() + "/manifest.json", manifest.to_json().dump(2) + "\n");
    return manifest;
}

std::vector<double> classifier_radii(const RunConfig& cfg, const Grid& grid) {
    return cfg.classifier.radii.empty() ? default_radii(grid) : cfg.classifier.radii;
}

double estimate_scale(const std::vector<double>& samples) {
    // Frechet scale from the sample median: median = c / ln 2
    if (samples.empty()) return 0.0;
    return median(samples) * std::log(2.0);
}

} // namespace

MaxStableField simulate_replication(const RunConfig& cfg, const Grid& grid,
                                    std::size_t rep) {
    RngStream rep_rng = RngStream(cfg.seed).derive(kSimulateTag, rep);
    if (cfg.sim.field == FieldKind::m3) {
        if (!cfg.model.is_shape())
            throw ConfigError("simulation.field = m3 requires a shape model (compact_bump "
                              "or comb), got '" + cfg.model.name() + "'");
        const ShapeLaw law = shape_law_from_model(cfg.model, grid);
        if (cfg.grid.padding < law.support_radius)
            throw ConfigError("grid.padding (" + std::to_string(cfg.grid.padding) +
                              ") is below the shape support radius (" +
                              std::to_string(law.support_radius) + ")");
        M3Config m3;
        m3.padding = cfg.grid.padding;
        m3.sim = cfg.sim.sim_config();
        return simulate_m3(law, grid, rep_rng, m3);
    }
    return simulate_dehaan(cfg.model, grid, rep_rng, cfg.sim.sim_config());
}

RunManifest cmd_simulate(const RunConfig& cfg, const std::string& out_dir) {
    Timer timer;
    OutputWriter writer(out_dir);
    const Grid grid = cfg.grid.make();
    const std::size_t n_reps = cfg.sim.n_reps;

    std::vector<double> origin(n_reps);
    std::vector<std::uint8_t> rep_exact(n_reps, 1), rep_log(n_reps, 1);
    const std::size_t n_save = std::min<std::size_t>(cfg.sim.save_fields, n_reps);
    std::vector<MaxStableField> saved(n_save);

    parallel_for(n_reps, cfg.threads, [&](std::size_t rep) {
        MaxStableField field = simulate_replication(cfg, grid, rep);
        origin[rep] = field.values[grid.flat(0)];
        rep_exact[rep] = field.truncation.exact ? 1 : 0;
        rep_log[rep] = field.truncation.atom_log_complete ? 1 : 0;
        if (rep < n_save) saved[rep] = std::move(field);
    });
    bool exact = true, log_complete = true;
    for (std::size_t rep = 0; rep < n_reps; ++rep) {
        exact = exact && rep_exact[rep];
        log_complete = log_complete && rep_log[rep];
    }

    for (std::size_t k = 0; k < n_save; ++k) {
        writer.write("field_" + zero_pad(k) + ".csv", field_to_csv(saved[k]));
        writer.write_json("field_" + zero_pad(k) + ".json", field_to_json(saved[k]));
    }

    std::ostringstream samples;
    samples << "rep,origin_value\n";
    for (std::size_t rep = 0; rep < n_reps; ++rep)
        samples << rep << ',' << origin[rep] << '\n';
    writer.write("samples_origin.csv", samples.str());

    nlohmann::json summary;
    summary["schema_version"] = kSchemaVersion;
    summary["kind"] = "simulate_summary";
    summary["n_reps"] = n_reps;
    summary["origin_scale_estimate"] = estimate_scale(origin);
    summary["truncation_exact"] = exact;
    summary["atom_log_complete"] = log_complete;
    writer.write_json("summary.json", summary);

    return finalize(writer, cfg, "simulate", timer, exact, log_complete);
}

RunManifest cmd_classify(const RunConfig& cfg, const std::string& out_dir) {
    Timer timer;
    OutputWriter writer(out_dir);
    const Grid grid = cfg.grid.make();
    const std::size_t n_reps = cfg.sim.n_reps;

    ClassifyOptions opts;
    opts.thresholds = cfg.classifier.thresholds;
    opts.radii = classifier_radii(cfg, grid);
    opts.run_weighted = cfg.classifier.weighted;

    std::vector<PathClassification> rows(n_reps);
    parallel_for(n_reps, cfg.threads, [&](std::size_t rep) {
        RngStream rep_rng = RngStream(cfg.seed).derive(kClassifyTag, rep);
        const SpectralPath path = sample_path(cfg.model, grid, rep_rng);
        rows[rep] = classify_path(path, opts);
    });

    std::ostringstream jsonl;
    std::size_t conflicts = 0;
    std::size_t tally[2][5] = {};
    for (std::size_t rep = 0; rep < n_reps; ++rep) {
        nlohmann::json row = classification_to_json(rows[rep]);
        row["path_index"] = rep;
        jsonl << row.dump() << '\n';
        conflicts += rows[rep].conflict();
        tally[0][static_cast<int>(rows[rep].hopf_label())] += 1;
        tally[1][static_cast<int>(rows[rep].neveu_label())] += 1;
    }
    writer.write("verdicts.jsonl", jsonl.str());

    auto label_count = [&](int axis, ConeLabel label) {
        return tally[axis][static_cast<int>(label)];
    };
    nlohmann::json summary;
    summary["schema_version"] = kSchemaVersion;
    summary["kind"] = "classify_summary";
    summary["n_paths"] = n_reps;
    summary["hopf"] = {{"conservative", label_count(0, ConeLabel::conservative)},
                       {"dissipative", label_count(0, ConeLabel::dissipative)},
                       {"inconclusive", label_count(0, ConeLabel::inconclusive)}};
    summary["neveu"] = {{"positive", label_count(1, ConeLabel::positive)},
                        {"null", label_count(1, ConeLabel::null_recurrent)},
                        {"inconclusive", label_count(1, ConeLabel::inconclusive)}};
    summary["conflicts"] = conflicts;
    writer.write_json("summary.json", summary);

    return finalize(writer, cfg, "classify", timer, true, true);
}

RunManifest cmd_decompose(const RunConfig& cfg, const std::string& out_dir, ConeAxis axis,
                          UnassignedPolicy policy) {
    Timer timer;
    OutputWriter writer(out_dir);
    const Grid grid = cfg.grid.make();
    const std::size_t n_reps = cfg.sim.n_reps;

    ClassifyOptions opts;
    opts.thresholds = cfg.classifier.thresholds;
    opts.radii = classifier_radii(cfg, grid);
    opts.run_sup_local = false;  // atom routing only needs the two axes

    std::vector<double> part1_origin(n_reps), part2_origin(n_reps);
    std::vector<std::size_t> counts1(n_reps), counts2(n_reps), counts_un(n_reps);
    std::vector<std::uint8_t> recon_ok(n_reps, 1);
    const std::size_t n_save = std::min<std::size_t>(cfg.sim.save_fields, n_reps);
    std::vector<Decomposition> saved(n_save);
    std::vector<MaxStableField> saved_fields(n_save);

    parallel_for(n_reps, cfg.threads, [&](std::size_t rep) {
        // same replication law as cmd_simulate under the same config
        MaxStableField field = simulate_replication(cfg, grid, rep);

        std::vector<ConeLabel> labels(field.atoms.size());
        for (std::size_t i = 0; i < field.atoms.size(); ++i) {
            const PathClassification cls = classify_path(field.atoms[i].path, opts);
            labels[i] = axis == ConeAxis::hopf ? cls.hopf_label() : cls.neveu_label();
        }
        Decomposition dec = split_atoms(field, axis, labels, policy);

        part1_origin[rep] = dec.part1.values[grid.flat(0)];
        part2_origin[rep] = dec.part2.values[grid.flat(0)];
        counts1[rep] = dec.part1.atoms.size();
        counts2[rep] = dec.part2.atoms.size();
        counts_un[rep] = dec.unassigned.size();

        const std::vector<double> un = dec.unassigned_values();
        for (std::size_t f = 0; f < field.values.size(); ++f) {
            const double recombined =
                std::max(std::max(dec.part1.values[f], dec.part2.values[f]), un[f]);
            if (recombined != field.values[f]) { recon_ok[rep] = 0; break; }
        }
        if (rep < n_save) {
            saved[rep] = std::move(dec);
            saved_fields[rep] = std::move(field);
        }
    });

    for (std::size_t k = 0; k < n_save; ++k) {
        writer.write("part1_" + zero_pad(k) + ".csv", field_to_csv(saved[k].part1));
        writer.write("part2_" + zero_pad(k) + ".csv", field_to_csv(saved[k].part2));
    }
    if (n_save > 0) {
        // the moving-maximum view of the first replication
        const M3Extraction extraction = extract_m3(saved_fields[0]);
        writer.write_json("m3_atoms.json", m3_atoms_to_json(extraction));
    }

    const IndependenceReport indep = independence_check(part1_origin, part2_origin);

    std::size_t total1 = 0, total2 = 0, total_un = 0;
    bool all_recon = true;
    for (std::size_t rep = 0; rep < n_reps; ++rep) {
        total1 += counts1[rep];
        total2 += counts2[rep];
        total_un += counts_un[rep];
        all_recon = all_recon && recon_ok[rep];
    }

    nlohmann::json summary;
    summary["schema_version"] = kSchemaVersion;
    summary["kind"] = "decompose_summary";
    summary["axis"] = to_string(axis);
    summary["policy"] = to_string(policy);
    summary["n_reps"] = n_reps;
    summary["atoms_part1"] = total1;
    summary["atoms_part2"] = total2;
    summary["atoms_unassigned"] = total_un;
    summary["reconstruction_exact"] = all_recon;
    summary["independence_max_deviation"] = indep.max_deviation;
    writer.write_json("decomposition.json", summary);

    return finalize(writer, cfg, "decompose", timer, true, true);
}

RunManifest cmd_diagnose(const RunConfig& cfg, const std::string& out_dir) {
    Timer timer;
    OutputWriter writer(out_dir);
    const Grid grid = cfg.grid.make();
    const RngStream root = RngStream(cfg.seed).derive(kDiagnoseTag);
    const std::size_t n_reps = cfg.sim.n_reps;

    DiagnosticReport report;
    report.model_name = cfg.model.name();
    report.seed = cfg.seed;
    report.n_reps = n_reps;

    const std::vector<double> lags =
        cfg.diag.lags.empty() ? default_mixing_lags(256.0) : cfg.diag.lags;
    report.min_expectation =
        est_min_expectation(cfg.model, lags, n_reps, root.derive(1), cfg.threads);
    report.tail = est_tail_probabilities(cfg.model, lags, cfg.diag.delta_sweep, n_reps,
                                         root.derive(2), cfg.threads);

    const std::vector<double> radii =
        cfg.diag.radii.empty() ? default_radii(grid) : cfg.diag.radii;
    report.cesaro = est_cesaro_criterion(cfg.model, grid, radii, std::min<std::size_t>(n_reps, 200),
                                         root.derive(3), cfg.threads);

    // classification tallies for the verdict inputs
    ClassifyOptions copts;
    copts.thresholds = cfg.classifier.thresholds;
    copts.radii = classifier_radii(cfg, grid);
    const std::size_t n_cls = cfg.model.is_deterministic() ? 1 : std::min<std::size_t>(n_reps, 200);
    VerdictInputs vin;
    vin.n_paths = n_cls;
    {
        std::vector<PathClassification> rows(n_cls);
        parallel_for(n_cls, cfg.threads, [&](std::size_t rep) {
            RngStream rep_rng = root.derive(4).derive(0x61, rep);
            const SpectralPath path = sample_path(cfg.model, grid, rep_rng);
            rows[rep] = classify_path(path, copts);
        });
        for (const auto& cls : rows) {
            vin.hopf_integral_dissipative += cls.hopf_integral.label == ConeLabel::dissipative;
            vin.hopf_integral_conservative += cls.hopf_integral.label == ConeLabel::conservative;
            vin.decay_dissipative += cls.hopf_decay.label == ConeLabel::dissipative;
            vin.decay_conservative += cls.hopf_decay.label == ConeLabel::conservative;
            vin.neveu_null += cls.neveu_cesaro.label == ConeLabel::null_recurrent;
            vin.neveu_positive += cls.neveu_cesaro.label == ConeLabel::positive;
        }
    }
    vin.cesaro_median = report.cesaro.median_A;

    // sup over K = [0, subwindow] and the origin marginal, from field sims
    {
        std::vector<double> pts;
        for (double x = 0.0; x <= cfg.diag.subwindow + 1e-9; x += grid.spacing)
            pts.push_back(x);
        const std::size_t n_theta = std::min<std::size_t>(n_reps, 20000);
        std::vector<double> sups(n_theta), origins(n_theta);
        bool exact = true;

        if (cfg.sim.field == FieldKind::m3) {
            const ShapeLaw law = shape_law_from_model(cfg.model, grid);
            SimConfig sim = cfg.sim.sim_config();
            sim.mode = Truncation::Mode::threshold;
            PointFieldSimulator fields(law, pts, law.support_radius + 1.0, grid.spacing,
                                       grid.lattice, sim);
            parallel_for(n_theta, cfg.threads, [&](std::size_t i) {
                const std::vector<double> eta = fields.simulate(root.derive(5).derive(0x62, i));
                sups[i] = *std::max_element(eta.begin(), eta.end());
                origins[i] = eta[0];
            });
        } else {
            SimConfig sim = cfg.sim.sim_config();
            if (!cfg.model.sup_bound()) {
                sim.mode = Truncation::Mode::fixed_n;
                exact = false;
            } else {
                sim.mode = Truncation::Mode::threshold;
            }
            PointFieldSimulator fields(cfg.model, pts, sim);
            parallel_for(n_theta, cfg.threads, [&](std::size_t i) {
                const std::vector<double> eta = fields.simulate(root.derive(5).derive(0x62, i));
                sups[i] = *std::max_element(eta.begin(), eta.end());
                origins[i] = eta[0];
            });
        }
        report.theta = est_theta(sups, cfg.diag.z_values);
        report.truncation_exact = exact;
        vin.unit_sup_samples = std::move(sups);
        vin.origin_samples = std::move(origins);
    }

    // the spectral/field cross-identity where the unit-scale precondition holds
    for (double lag : cfg.diag.identity_lags) {
        IdentityOptions iopts;
        iopts.n_atoms = cfg.diag.identity_atoms;
        iopts.threads = cfg.threads;
        try {
            report.identity.push_back(
                est_bivariate_identity(cfg.model, lag, n_reps, root.derive(6), iopts));
        } catch (const std::invalid_argument&) {
            break;  // un-normalized model: the identity row set stays empty
        }
    }

    vin.tail = report.tail;
    report.verdicts = make_verdicts(vin);

    writer.write_json("report.json", report_to_json(report));
    writer.write("min_expectation.csv", curve_to_csv(report.min_expectation));
    writer.write("cesaro.csv", cesaro_to_csv(report.cesaro));
    writer.write("theta.csv", theta_to_csv(report.theta));
    writer.write("tail.csv", tail_to_csv(report.tail));

    return finalize(writer, cfg, "diagnose", timer, report.truncation_exact, true);
}

std::string cmd_report(const std::string& run_dir) {
    const std::string manifest_path = run_dir + "/manifest.json";
    if (!std::filesystem::exists(manifest_path))
        throw DataError("report: no manifest.json in '" + run_dir + "'");
    nlohmann::json manifest;
    try {
        manifest = nlohmann::json::parse(read_text_file(manifest_path));
    } catch (const nlohmann::json::exception& e) {
        throw DataError("report: manifest.json unreadable: " + std::string(e.what()));
    }

    std::ostringstream out;
    out << "run: " << manifest.value("command", "?")
        << "  (toolkit " << manifest.value("toolkit_version", "?") << ")\n";
    out << "config hash: " << manifest.value("config_hash", "?") << "\n";
    out << "wall seconds: " << manifest.value("wall_seconds", 0.0) << "\n";
    out << "truncation exact: " << (manifest.value("truncation_exact", false) ? "yes" : "no")
        << ", atom log complete: "
        << (manifest.value("atom_log_complete", false) ? "yes" : "no") << "\n\n";

    out << "outputs (digests verified):\n";
    for (const auto& entry : manifest.at("outputs")) {
        const std::string name = entry.at("path").get<std::string>();
        const std::string content = read_text_file(run_dir + "/" + name);
        const std::string digest = fnv1a64_hex(content);
        if (digest != entry.at("digest").get<std::string>())
            throw DataError("report: digest mismatch for '" + name + "'");
        out << "  " << name << "  " << content.size() << " bytes  " << digest << "\n";
    }

    const std::string report_path = run_dir + "/report.json";
    if (std::filesystem::exists(report_path)) {
        const nlohmann::json rep = nlohmann::json::parse(read_text_file(report_path));
        out << "\nmodel: " << rep.value("model", "?") << "\n";
        const auto& verdicts = rep.at("verdicts");
        out << "verdicts: ergodic=" << verdicts.value("ergodic", "?")
            << " mixing=" << verdicts.value("mixing", "?")
            << " m3=" << verdicts.value("m3", "?")
            << (verdicts.value("conflict", false) ? "  [conflicting evidence]" : "") << "\n";
        for (const auto& ev : verdicts.at("evidence"))
            out << "  - " << ev.get<std::string>() << "\n";
        if (!rep.at("identity").empty()) {
            out << "identity gaps (lhs - rhs, +-3 pooled se):\n";
            for (const auto& row : rep.at("identity"))
                out << "  lag " << row.at("lag").get<double>() << ": "
                    << row.at("gap").get<double>() << " +- "
                    << 3.0 * row.at("pooled_se").get<double>() << "\n";
        }
    }
    const std::string summary_path = run_dir + "/summary.json";
    if (std::filesystem::exists(summary_path)) {
        const nlohmann::json s = nlohmann::json::parse(read_text_file(summary_path));
        out << "\nsummary: " << s.dump() << "\n";
    }
    const std::string dec_path = run_dir + "/decomposition.json";
    if (std::filesystem::exists(dec_path)) {
        const nlohmann::json s = nlohmann::json::parse(read_text_file(dec_path));
        out << "\ndecomposition: " << s.dump() << "\n";
    }

    const std::string text = out.str();
    write_text_file(run_dir + "/report.txt", text);
    return text;
}

} // namespace maxstab
