// maxstab: simulate, classify, decompose and diagnose stationary max-stable
// fields built from spectral atoms.
//
// usage:
//   maxstab <simulate|classify|decompose|diagnose> --config PATH
//           [--seed N] [--out DIR] [--reps N] [--threads N]
//           [--axis hopf|neveu] [--policy strict|assign_to_part1|assign_to_part2]
//   maxstab report <RUN_DIR>
//
// exit codes: 0 success, 2 config error, 3 data error, 4 numeric failure.

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include "maxstab/errors.hpp"
#include "maxstab/runner.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitConfig = 2;
constexpr int kExitData = 3;
constexpr int kExitNumeric = 4;

struct CliArgs {
    std::string command;
    std::string config_path;
    std::string run_dir;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out_dir;
    std::optional<std::size_t> reps;
    std::optional<unsigned> threads;
    maxstab::ConeAxis axis = maxstab::ConeAxis::hopf;
    maxstab::UnassignedPolicy policy = maxstab::UnassignedPolicy::strict;
};

void usage(std::ostream& out) {
    out << "usage: maxstab <simulate|classify|decompose|diagnose> --config PATH\n"
           "               [--seed N] [--out DIR] [--reps N] [--threads N]\n"
           "               [--axis hopf|neveu] [--policy strict|assign_to_part1|assign_to_part2]\n"
           "       maxstab report <RUN_DIR>\n";
}

CliArgs parse_args(int argc, char** argv) {
    if (argc < 2) throw maxstab::ConfigError("no subcommand given");
    CliArgs args;
    args.command = argv[1];
    if (args.command == "report") {
        if (argc < 3) throw maxstab::ConfigError("report: run directory required");
        args.run_dir = argv[2];
        return args;
    }
    if (args.command != "simulate" && args.command != "classify" &&
        args.command != "decompose" && args.command != "diagnose")
        throw maxstab::ConfigError("unknown subcommand '" + args.command + "'");

    auto next_value = [&](int& i, const char* flag) -> std::string {
        if (i + 1 >= argc)
            throw maxstab::ConfigError(std::string(flag) + ": value required");
        return argv[++i];
    };
    for (int i = 2; i < argc; ++i) {
        const std::string flag = argv[i];
        if (flag == "--config") args.config_path = next_value(i, "--config");
        else if (flag == "--seed") args.seed = std::stoull(next_value(i, "--seed"));
        else if (flag == "--out") args.out_dir = next_value(i, "--out");
        else if (flag == "--reps") args.reps = std::stoull(next_value(i, "--reps"));
        else if (flag == "--threads")
            args.threads = static_cast<unsigned>(std::stoul(next_value(i, "--threads")));
        else if (flag == "--axis") {
            const std::string v = next_value(i, "--axis");
            if (v == "hopf") args.axis = maxstab::ConeAxis::hopf;
            else if (v == "neveu") args.axis = maxstab::ConeAxis::neveu;
            else throw maxstab::ConfigError("--axis: 'hopf' or 'neveu'");
        } else if (flag == "--policy") {
            const std::string v = next_value(i, "--policy");
            if (v == "strict") args.policy = maxstab::UnassignedPolicy::strict;
            else if (v == "assign_to_part1") args.policy = maxstab::UnassignedPolicy::assign_to_part1;
            else if (v == "assign_to_part2") args.policy = maxstab::UnassignedPolicy::assign_to_part2;
            else throw maxstab::ConfigError("--policy: strict|assign_to_part1|assign_to_part2");
        } else {
            throw maxstab::ConfigError("unknown flag '" + flag + "'");
        }
    }
    if (args.config_path.empty())
        throw maxstab::ConfigError(args.command + ": --config PATH required");
    return args;
}

} // namespace

int main(int argc, char** argv) {
    try {
        const CliArgs args = parse_args(argc, argv);

        if (args.command == "report") {
            std::cout << maxstab::cmd_report(args.run_dir);
            return kExitOk;
        }

        maxstab::RunConfig cfg = maxstab::load_run_config(args.config_path);
        if (args.seed) cfg.seed = *args.seed;
        if (args.reps) {
            if (*args.reps == 0) throw maxstab::ConfigError("--reps: empty run");
            cfg.sim.n_reps = *args.reps;
        }
        if (args.threads) {
            cfg.threads = *args.threads;
        } else if (const char* env = std::getenv("MAXSTAB_THREADS")) {
            cfg.threads = static_cast<unsigned>(std::strtoul(env, nullptr, 10));
        }
        if (cfg.threads == 0) cfg.threads = 1;
        const std::string out_dir = args.out_dir.value_or(cfg.out_dir);

        maxstab::RunManifest manifest;
        if (args.command == "simulate") manifest = maxstab::cmd_simulate(cfg, out_dir);
        else if (args.command == "classify") manifest = maxstab::cmd_classify(cfg, out_dir);
        else if (args.command == "decompose")
            manifest = maxstab::cmd_decompose(cfg, out_dir, args.axis, args.policy);
        else manifest = maxstab::cmd_diagnose(cfg, out_dir);

        std::cout << args.command << ": " << manifest.outputs.size()
                  << " artifacts in " << out_dir << " (config " << manifest.config_hash
                  << ", " << manifest.wall_seconds << " s)\n";
        return kExitOk;
    } catch (const maxstab::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        usage(std::cerr);
        return kExitConfig;
    } catch (const maxstab::DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return kExitData;
    } catch (const maxstab::NumericError& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return kExitNumeric;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::domain_error& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return kExitNumeric;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    }
    (void)kExitUsage;
}
