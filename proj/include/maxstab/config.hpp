#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "maxstab/catalog.hpp"
#include "maxstab/cones.hpp"
#include "maxstab/simulate.hpp"

namespace maxstab {

struct GridSpec {
    int dim = 1;
    bool lattice = false;
    double spacing = 0.125;
    double radius = 64.0;
    double padding = 2.0;  // moving-maximum position padding

    Grid make() const;
};

enum class FieldKind { dehaan, m3 };

struct SimulationSpec {
    FieldKind field = FieldKind::dehaan;
    Truncation::Mode mode = Truncation::Mode::fixed_n;
    std::size_t n_atoms = 500;
    std::optional<double> sup_bound;
    std::size_t n_reps = 1000;
    std::size_t atom_log_cap = 10000;
    std::size_t save_fields = 4;  // replications dumped as CSV/JSON

    SimConfig sim_config() const {
        SimConfig cfg;
        cfg.mode = mode;
        cfg.n_atoms = n_atoms;
        cfg.sup_bound = sup_bound;
        cfg.atom_log_cap = atom_log_cap;
        return cfg;
    }
};

struct ClassifierSpec {
    ConeThresholds thresholds;
    std::vector<double> radii;  // empty -> dyadic default for the window
    bool weighted = false;
};

struct DiagnosticsSpec {
    std::vector<double> lags;          // empty -> dyadic + generic ladder
    std::vector<double> radii;         // empty -> classifier/dyadic ladder
    std::vector<double> z_values = {0.5, 1.0, 2.0};
    std::vector<double> delta_sweep = {0.05, 0.1, 0.2};
    double subwindow = 1.0;            // theta over K = [0, subwindow]^d
    std::vector<double> identity_lags = {1.0, 2.0, 4.0};
    std::size_t identity_atoms = 2000;
};

struct RunConfig {
    SpectralModel model = SpectralModel::constant(1.0);
    GridSpec grid;
    SimulationSpec sim;
    ClassifierSpec classifier;
    DiagnosticsSpec diag;
    std::uint64_t seed = 1;
    unsigned threads = 1;
    std::string out_dir = "out";
};

/// Parses and validates; every failure names the offending field path
/// (ConfigError).
RunConfig parse_run_config(const nlohmann::json& j);
RunConfig load_run_config(const std::string& path);

nlohmann::json model_to_json(const SpectralModel& model);
SpectralModel model_from_json(const nlohmann::json& j, const std::string& path);

/// Config with every default made explicit; hashing this is the run identity.
nlohmann::json effective_config_json(const RunConfig& cfg);

struct ManifestEntry {
    std::string path;
    std::size_t bytes = 0;
    std::string digest;
};

struct RunManifest {
    std::string toolkit_version;
    std::string command;
    std::string config_hash;
    double wall_seconds = 0.0;
    nlohmann::json effective_config;
    std::vector<ManifestEntry> outputs;
    bool truncation_exact = true;
    bool atom_log_complete = true;

    nlohmann::json to_json() const;
};

inline constexpr const char* kToolkitVersion = "0.1.0";

/// Funnels all artifact writes through one place and records digests.
class OutputWriter {
public:
    explicit OutputWriter(std::string dir);
    void write(const std::string& name, const std::string& content);
    void write_json(const std::string& name, const nlohmann::json& j);
    const std::vector<ManifestEntry>& entries() const { return entries_; }
    const std::string& dir() const { return dir_; }

private:
    std::string dir_;
    std::vector<ManifestEntry> entries_;
};

} // namespace maxstab
