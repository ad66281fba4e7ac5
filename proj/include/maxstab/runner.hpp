#pragma once

#include <string>

#include "maxstab/config.hpp"
#include "maxstab/decompose.hpp"
#include "maxstab/diagnostics.hpp"

namespace maxstab {

/// CLI subcommand bodies. Each writes its artifacts plus manifest.json under
/// `out_dir` and returns the manifest. Errors surface as ConfigError /
/// DataError / NumericError, which the CLI maps to exit codes 2 / 3 / 4.
RunManifest cmd_simulate(const RunConfig& cfg, const std::string& out_dir);
RunManifest cmd_classify(const RunConfig& cfg, const std::string& out_dir);
RunManifest cmd_decompose(const RunConfig& cfg, const std::string& out_dir,
                          ConeAxis axis = ConeAxis::hopf,
                          UnassignedPolicy policy = UnassignedPolicy::strict);
RunManifest cmd_diagnose(const RunConfig& cfg, const std::string& out_dir);

/// Verifies digests of a finished run directory and renders the summary
/// (also written to report.txt there).
std::string cmd_report(const std::string& run_dir);

/// One field replication as configured (de Haan or moving-maximum).
MaxStableField simulate_replication(const RunConfig& cfg, const Grid& grid,
                                    std::size_t rep);

} // namespace maxstab
