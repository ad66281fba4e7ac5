#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "maxstab/catalog.hpp"
#include "maxstab/cones.hpp"
#include "maxstab/grid.hpp"
#include "maxstab/rng.hpp"

namespace maxstab {

/// One Poisson atom of the field: level u, spectral path on the window,
/// cone labels once classified, and the translation for moving-maximum atoms.
struct Atom {
    double u = 0.0;
    SpectralPath path;
    std::optional<ConeLabel> hopf_label;
    std::optional<ConeLabel> neveu_label;
    std::optional<std::array<long, 2>> origin;
};

struct Truncation {
    enum class Mode { fixed_n, threshold };
    Mode mode = Mode::fixed_n;
    std::size_t n_used = 0;
    bool exact = false;
    bool atom_log_complete = true;
};

/// Max-stable field on a window: pointwise max over the retained atoms.
/// While the atom log is complete, values are recomputable from it exactly.
struct MaxStableField {
    Grid grid;
    std::vector<double> values;
    std::vector<Atom> atoms;
    Truncation truncation;
};

struct SimConfig {
    Truncation::Mode mode = Truncation::Mode::fixed_n;
    std::size_t n_atoms = 500;              // fixed_n mode
    std::optional<double> sup_bound;        // threshold mode; default from model
    std::size_t max_atoms = 200000;         // threshold-mode guard
    std::size_t atom_log_cap = 10000;
};

/// Substream tags: atom i of replication r always draws from the same
/// substream, whatever the stopping rule or thread layout, so threshold runs
/// are exact prefixes of longer fixed-n runs.
inline constexpr std::uint64_t kLevelStreamTag = 0x11;
inline constexpr std::uint64_t kAtomStreamTag = 0x22;
inline constexpr std::uint64_t kPositionStreamTag = 0x33;

/// Field from the de Haan construction: eta(x) = max_i U_i Y_i(x).
/// threshold mode keeps drawing while U_next * tau can still beat the current
/// minimum over points where the model has mass, and is exact; fixed_n is the
/// documented approximation for unbounded models (Brown-Resnick), which
/// reject threshold mode.
MaxStableField simulate_dehaan(const SpectralModel& model, const Grid& grid,
                               RngStream rng, const SimConfig& cfg);

/// One draw of a translated shape: eval takes coordinate offsets from the
/// atom's position (second component ignored for d=1).
struct ShapeDraw {
    std::function<double(double, double)> eval;
    double sup = 1.0;
};

/// Law of the moving-maximum shape Z.
struct ShapeLaw {
    std::function<ShapeDraw(RngStream&)> draw;
    double support_radius = 1.0;
    double sup_bound = 1.0;
    double mean_integral = 1.0;  // E integral Z dlambda = marginal field scale
    int dim = 1;
};

/// Shape law of a catalog shape model (bump or comb); the integral is taken
/// in the grid's quadrature measure.
ShapeLaw shape_law_from_model(const SpectralModel& model, const Grid& grid);

/// Empirical law over extracted, normalized shapes (uniform pick per atom).
/// Paths must share one grid shape; evaluation snaps offsets to that grid.
ShapeLaw shape_law_from_paths(std::vector<SpectralPath> pool);

struct M3Config {
    double padding = 0.0;  // >= shape support radius
    SimConfig sim;         // threshold by default gives the exact field
};

/// Moving-maximum field eta(x) = max_i V_i Z_i(x - X_i): positions uniform on
/// the padded window grid, levels V_i = lambda(padded) / Gamma_i decreasing.
/// Exact on the inner window under threshold stopping with tau = sup shape.
MaxStableField simulate_m3(const ShapeLaw& shape, const Grid& grid, RngStream rng,
                           const M3Config& cfg);

/// Pointwise max of two fields on the same grid; atom logs concatenate.
MaxStableField pointwise_max(const MaxStableField& a, const MaxStableField& b);

/// Scalar rescale of field values and atom levels.
MaxStableField rescale(const MaxStableField& f, double factor);

/// Max over logged atoms at every grid point; equals `values` exactly while
/// the atom log is complete.
std::vector<double> recompute_values(const MaxStableField& f);

/// Cheap field marginals at a handful of points, without atom logs.
/// Used by the Monte Carlo estimators.
class PointFieldSimulator {
public:
    /// De Haan field of `model` observed at `points` (d=1).
    PointFieldSimulator(const SpectralModel& model, std::vector<double> points,
                        SimConfig cfg, bool force_cholesky = true);
    /// Moving-maximum field of `shape` observed at `points` (d=1); positions
    /// live on a grid of the given spacing covering the points plus padding.
    PointFieldSimulator(ShapeLaw shape, std::vector<double> points, double padding,
                        double position_spacing, bool position_lattice, SimConfig cfg);

    std::vector<double> simulate(RngStream rep_rng) const;
    const std::vector<double>& points() const { return points_; }

private:
    std::vector<double> points_;
    SimConfig cfg_;
    // de Haan state
    std::optional<PointSampler> sampler_;
    std::vector<std::uint8_t> mass_mask_;
    std::optional<double> tau_;
    // moving-maximum state
    std::optional<ShapeLaw> shape_;
    double pos_spacing_ = 1.0;
    long pos_lo_ = 0, pos_hi_ = 0;
    double pos_area_ = 0.0;
};

} // namespace maxstab
