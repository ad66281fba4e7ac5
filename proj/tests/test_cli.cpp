#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>

#include "maxstab/config.hpp"
#include "maxstab/errors.hpp"
#include "maxstab/io.hpp"
#include "maxstab/runner.hpp"

using namespace maxstab;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& tag) {
        path = fs::temp_directory_path() / ("maxstab_test_" + tag);
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string str() const { return path.string(); }
};

nlohmann::json tiny_constant_config() {
    return nlohmann::json{
        {"model", {{"kind", "constant"}, {"level", 1.0}}},
        {"grid", {{"dim", 1}, {"type", "lattice"}, {"spacing", 1.0}, {"radius", 4}}},
        {"simulation",
         {{"field", "dehaan"}, {"mode", "threshold"}, {"n_reps", 50}, {"save_fields", 2}}},
        {"seed", 7}};
}

std::map<std::string, std::string> artifact_digests(const std::string& dir) {
    const nlohmann::json manifest =
        nlohmann::json::parse(read_text_file(dir + "/manifest.json"));
    std::map<std::string, std::string> out;
    for (const auto& e : manifest.at("outputs"))
        out[e.at("path").get<std::string>()] = e.at("digest").get<std::string>();
    return out;
}

} // namespace

TEST_CASE("config parsing: defaults, validation, field paths") {
    const RunConfig minimal =
        parse_run_config(nlohmann::json{{"model", {{"kind", "brown_resnick"}}}});
    CHECK(minimal.model.name() == "brown_resnick");
    CHECK(minimal.grid.spacing == 0.125);
    CHECK(minimal.sim.n_reps == 1000);
    CHECK(minimal.seed == 1);

    CHECK_THROWS_AS((void)parse_run_config(nlohmann::json::object()), ConfigError);
    CHECK_THROWS_WITH_AS(
        (void)parse_run_config(nlohmann::json{{"model", {{"kind", "bogus"}}}}),
        doctest::Contains("model.kind"), ConfigError);
    CHECK_THROWS_WITH_AS(
        (void)parse_run_config(nlohmann::json{{"model", {{"kind", "constant"}}},
                                              {"grid", {{"radius", -2.0}}}}),
        doctest::Contains("grid.radius"), ConfigError);
    CHECK_THROWS_WITH_AS(
        (void)parse_run_config(nlohmann::json{{"model", {{"kind", "constant"}}},
                                              {"simulation", {{"n_reps", 0}}}}),
        doctest::Contains("empty run"), ConfigError);
}

TEST_CASE("model descriptors round-trip through JSON") {
    const auto mix = SpectralModel::mixture(
        {0.25, 0.75},
        {SpectralModel::brown_resnick(17, BrSampler::cholesky),
         SpectralModel::compact_bump(BumpKind::box, 2.0, 0.5)});
    for (const auto& model :
         {SpectralModel::constant(2.0), SpectralModel::brown_resnick(40),
          SpectralModel::compact_bump(), SpectralModel::comb(12), mix}) {
        const nlohmann::json j = model_to_json(model);
        const SpectralModel back = model_from_json(j, "model");
        CHECK(model_to_json(back) == j);
    }
}

TEST_CASE("simulate command writes artifacts and reproduces bitwise") {
    const RunConfig cfg = parse_run_config(tiny_constant_config());
    TempDir a("sim_a"), b("sim_b"), c("sim_c");

    const RunManifest ma = cmd_simulate(cfg, a.str());
    CHECK(fs::exists(a.path / "field_000.csv"));
    CHECK(fs::exists(a.path / "field_001.json"));
    CHECK(fs::exists(a.path / "samples_origin.csv"));
    CHECK(fs::exists(a.path / "summary.json"));
    CHECK(fs::exists(a.path / "manifest.json"));
    CHECK(ma.truncation_exact);

    (void)cmd_simulate(cfg, b.str());
    CHECK(artifact_digests(a.str()) == artifact_digests(b.str()));

    RunConfig other = cfg;
    other.seed = 8;
    (void)cmd_simulate(other, c.str());
    CHECK(artifact_digests(a.str()) != artifact_digests(c.str()));

    // constant model: every field row carries the same value
    const nlohmann::json field =
        nlohmann::json::parse(read_text_file(a.str() + "/field_000.json"));
    const auto& values = field.at("values");
    for (const auto& v : values) CHECK(v.get<double>() == values[0].get<double>());
}

TEST_CASE("classify command tallies the bump as dissipative") {
    RunConfig cfg = parse_run_config(nlohmann::json{
        {"model", {{"kind", "compact_bump"}}},
        {"grid", {{"dim", 1}, {"type", "continuous"}, {"spacing", 0.125}, {"radius", 64}}},
        {"simulation", {{"n_reps", 20}}},
        {"seed", 3}});
    TempDir dir("classify");
    (void)cmd_classify(cfg, dir.str());
    const nlohmann::json summary =
        nlohmann::json::parse(read_text_file(dir.str() + "/summary.json"));
    CHECK(summary.at("hopf").at("dissipative").get<std::size_t>() == 20);
    CHECK(summary.at("neveu").at("null").get<std::size_t>() == 20);
    CHECK(summary.at("conflicts").get<std::size_t>() == 0);
    CHECK(fs::exists(dir.path / "verdicts.jsonl"));
}

TEST_CASE("decompose command splits the mixture and reconstructs exactly") {
    RunConfig cfg = parse_run_config(nlohmann::json{
        {"model",
         {{"kind", "mixture"},
          {"weights", {0.5, 0.5}},
          {"parts",
           {{{"kind", "constant"}, {"level", 1.0}}, {{"kind", "compact_bump"}}}}}},
        {"grid", {{"dim", 1}, {"type", "lattice"}, {"spacing", 1.0}, {"radius", 64}}},
        {"simulation", {{"mode", "threshold"}, {"n_reps", 100}, {"save_fields", 1}}},
        {"seed", 11}});
    TempDir dir("decompose");
    (void)cmd_decompose(cfg, dir.str(), ConeAxis::hopf, UnassignedPolicy::strict);
    const nlohmann::json summary =
        nlohmann::json::parse(read_text_file(dir.str() + "/decomposition.json"));
    CHECK(summary.at("reconstruction_exact").get<bool>());
    CHECK(summary.at("atoms_part1").get<std::size_t>() > 0);
    CHECK(summary.at("atoms_part2").get<std::size_t>() > 0);
    CHECK(summary.at("independence_max_deviation").get<double>() < 0.1);
    CHECK(fs::exists(dir.path / "part1_000.csv"));
    CHECK(fs::exists(dir.path / "part2_000.csv"));
    CHECK(fs::exists(dir.path / "m3_atoms.json"));
}

TEST_CASE("diagnose command reaches the expected verdicts per model") {
    SUBCASE("bump moving maximum: everything supported") {
        RunConfig cfg = parse_run_config(nlohmann::json{
            {"model", {{"kind", "compact_bump"}}},
            {"grid",
             {{"dim", 1}, {"type", "continuous"}, {"spacing", 0.125}, {"radius", 64},
              {"padding", 2.0}}},
            {"simulation", {{"field", "m3"}, {"mode", "threshold"}, {"n_reps", 2000}}},
            {"diagnostics", {{"lags", {1.0, 2.0, 4.0, 8.0, 16.0, 32.0}},
                             {"identity_lags", {3.0}}}},
            {"seed", 21}});
        TempDir dir("diag_bump");
        (void)cmd_diagnose(cfg, dir.str());
        const nlohmann::json rep =
            nlohmann::json::parse(read_text_file(dir.str() + "/report.json"));
        CHECK(rep.at("verdicts").at("ergodic") == "supported");
        CHECK(rep.at("verdicts").at("mixing") == "supported");
        CHECK(rep.at("verdicts").at("m3") == "supported");
        CHECK_FALSE(rep.at("verdicts").at("conflict").get<bool>());
        CHECK(std::abs(rep.at("identity")[0].at("gap").get<double>()) <
              3.0 * rep.at("identity")[0].at("pooled_se").get<double>());
    }

    SUBCASE("constant: everything rejected") {
        RunConfig cfg = parse_run_config(nlohmann::json{
            {"model", {{"kind", "constant"}, {"level", 1.0}}},
            {"grid", {{"dim", 1}, {"type", "lattice"}, {"spacing", 1.0}, {"radius", 64}}},
            {"simulation", {{"mode", "threshold"}, {"n_reps", 1000}}},
            {"diagnostics", {{"lags", {1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0}}}},
            {"seed", 22}});
        TempDir dir("diag_const");
        (void)cmd_diagnose(cfg, dir.str());
        const nlohmann::json rep =
            nlohmann::json::parse(read_text_file(dir.str() + "/report.json"));
        CHECK(rep.at("verdicts").at("ergodic") == "rejected");
        CHECK(rep.at("verdicts").at("mixing") == "rejected");
        CHECK(rep.at("verdicts").at("m3") == "rejected");
    }

    SUBCASE("comb moving maximum: conflict surfaces, all inconclusive") {
        RunConfig cfg = parse_run_config(nlohmann::json{
            {"model", {{"kind", "comb"}}},
            {"grid",
             {{"dim", 1}, {"type", "continuous"}, {"spacing", 0.125}, {"radius", 256},
              {"padding", 260.0}}},
            {"simulation", {{"field", "m3"}, {"mode", "threshold"}, {"n_reps", 500}}},
            {"diagnostics", {{"lags", {1.0, 2.0, 4.0, 8.0}}}},
            {"seed", 23}});
        TempDir dir("diag_comb");
        (void)cmd_diagnose(cfg, dir.str());
        const nlohmann::json rep =
            nlohmann::json::parse(read_text_file(dir.str() + "/report.json"));
        CHECK(rep.at("verdicts").at("conflict").get<bool>());
        CHECK(rep.at("verdicts").at("ergodic") == "inconclusive");
        CHECK(rep.at("verdicts").at("mixing") == "inconclusive");
        CHECK(rep.at("verdicts").at("m3") == "inconclusive");
    }

    SUBCASE("brown-resnick: ergodic but not mixing, no moving maximum") {
        RunConfig cfg = parse_run_config(nlohmann::json{
            {"model", {{"kind", "brown_resnick"}, {"truncation", 40}}},
            {"grid",
             {{"dim", 1}, {"type", "continuous"}, {"spacing", 0.125}, {"radius", 256}}},
            {"simulation", {{"mode", "fixed_n"}, {"n_atoms", 300}, {"n_reps", 4000}}},
            {"diagnostics",
             {{"lags", {1.0, 2.0, 4.0, 16.0, 64.0, 97.0, 199.0, 256.0}},
              {"radii", {16.0, 64.0, 256.0}},
              {"identity_lags", {1.0}}}},
            {"seed", 24}});
        TempDir dir("diag_br");
        (void)cmd_diagnose(cfg, dir.str());
        const nlohmann::json rep =
            nlohmann::json::parse(read_text_file(dir.str() + "/report.json"));
        CHECK(rep.at("verdicts").at("ergodic") == "supported");
        CHECK(rep.at("verdicts").at("mixing") == "rejected");
        CHECK(rep.at("verdicts").at("m3") == "rejected");
        CHECK_FALSE(rep.at("provenance").at("truncation_exact").get<bool>());
    }
}

TEST_CASE("report command verifies digests and renders a summary") {
    const RunConfig cfg = parse_run_config(tiny_constant_config());
    TempDir dir("report");
    (void)cmd_simulate(cfg, dir.str());

    const std::string text = cmd_report(dir.str());
    CHECK(text.find("digests verified") != std::string::npos);
    CHECK(text.find("summary") != std::string::npos);
    CHECK(fs::exists(dir.path / "report.txt"));

    SUBCASE("empty directory is a data error") {
        TempDir empty("report_empty");
        CHECK_THROWS_AS((void)cmd_report(empty.str()), DataError);
    }

    SUBCASE("tampering breaks the digest check") {
        std::ofstream tamper(dir.path / "summary.json", std::ios::app);
        tamper << " ";
        tamper.close();
        CHECK_THROWS_AS((void)cmd_report(dir.str()), DataError);
    }
}

#ifdef MAXSTAB_CLI_PATH
TEST_CASE("cli binary exit codes") {
    const std::string cli = MAXSTAB_CLI_PATH;
    auto run = [&](const std::string& args) {
        const int status = std::system((cli + " " + args + " > /dev/null 2>&1").c_str());
        return WEXITSTATUS(status);
    };
    TempDir dir("cli");
    const std::string cfg_path = dir.str() + "/cfg.json";
    write_text_file(cfg_path, tiny_constant_config().dump());

    CHECK(run("simulate --config " + cfg_path + " --out " + dir.str() + "/run") == 0);
    CHECK(run("report " + dir.str() + "/run") == 0);
    CHECK(run("bogus-subcommand") == 2);
    CHECK(run("simulate") == 2);
    CHECK(run("simulate --config /nonexistent.json") == 2);
    CHECK(run("simulate --config " + cfg_path + " --reps 0") == 2);
    CHECK(run("report " + dir.str() + "/empty_dir") == 3);
}
#endif
