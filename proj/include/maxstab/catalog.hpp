#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "maxstab/grid.hpp"
#include "maxstab/rng.hpp"

namespace maxstab {

/// Partial sum of the dyadic cosine series
///   sigma2(t) = sum_{k=1}^{K} (1 - cos(2 pi t / 2^k)).
/// Monotone in K; self-similar across dyadic rescalings of t.
double sigma2_series(double t, int K);

/// Bound on the dropped tail: sum_{k>K} (2 pi t / 2^k)^2 / 2.
double sigma2_tail_bound(double t, int K);

/// Scans t_n = 2^n / 3 for n = 1..limit and returns sigma2(t_n): every series
/// term with k <= n contributes 1 - cos(2 pi 2^(n-k)/3) = 3/2, so the values
/// grow roughly like 1.5 n. A probe, not a certificate of the growth rate.
std::vector<double> sigma2_growth_scan(int limit, int extra_terms = 40);

enum class BrSampler { series, cholesky };

enum class BumpKind { triangular, box };

struct ConstantModel {
    double level = 1.0;
};

struct BrownResnickModel {
    int truncation = 40;  // series terms K
    BrSampler sampler = BrSampler::series;
};

struct CompactBumpModel {
    BumpKind kind = BumpKind::triangular;
    double support_radius = 1.0;
    double height = 1.0;
};

struct CombModel {
    // 0 = derive from the window (radius + 1) when a grid is supplied.
    long n_bumps = 0;
};

struct SpectralModel;

struct MixtureModel {
    std::vector<double> weights;
    std::vector<SpectralModel> parts;
};

/// The catalog of spectral processes, each a generator of nonnegative paths Y
/// with finite mean at every point. Constant and Brown-Resnick laws make the
/// associated max-stable field stationary; the bump and comb entries are
/// deterministic shapes intended for moving-maximum constructions and as
/// classifier fixtures.
struct SpectralModel {
    std::variant<ConstantModel, BrownResnickModel, CompactBumpModel, CombModel,
                 MixtureModel>
        variant;

    static SpectralModel constant(double level);
    static SpectralModel brown_resnick(int truncation = 40,
                                       BrSampler sampler = BrSampler::series);
    static SpectralModel compact_bump(BumpKind kind = BumpKind::triangular,
                                      double support_radius = 1.0,
                                      double height = 1.0);
    static SpectralModel comb(long n_bumps = 0);
    static SpectralModel mixture(std::vector<double> weights,
                                 std::vector<SpectralModel> parts);

    bool is_deterministic() const;
    /// Shape models (bump, comb) have compact support and are translated by
    /// the moving-maximum simulator; the others are spectral laws as-is.
    bool is_shape() const;
    std::string name() const;

    /// E[Y(x)]: the marginal Frechet scale the de Haan field inherits (d=1).
    double mean_at(double x) const;
    double mean_at(const std::array<double, 2>& x) const;

    /// Almost-sure sup bound over paths, when one exists (nullopt for
    /// Brown-Resnick). Used for exact threshold stopping.
    std::optional<double> sup_bound() const;

    /// Support half-width for shape models.
    double support_radius() const;
};

/// Deterministic comb path value Z(x) = sum_{n=1}^{N} f(n^2 (x-n)) with
/// f(t) = (1 - t^2) on |t| <= 1; bump n occupies (n - 1/n^2, n + 1/n^2).
double comb_value(double x, long n_bumps);

/// Exact integral of the comb over [a, b].
double comb_integral(double a, double b, long n_bumps);

/// Sup of the comb over the line (bumps 1 and 2 overlap slightly, so this
/// exceeds 1 for n_bumps >= 2).
double comb_sup(long n_bumps);

/// Shape evaluation for bump models, d=1 and product form for d=2.
double bump_value(const CompactBumpModel& bump, double x);
double bump_value2(const CompactBumpModel& bump, double x0, double x1);

/// Z-path of the Brown-Resnick spectral process (dimension 1) on a grid,
/// pinned to Z(0) = 0. `series` sums truncation terms of the explicit
/// sin/cos expansion; `cholesky` factors the induced covariance.
SpectralPath brown_resnick_Z(const Grid& grid, int truncation, RngStream& rng,
                             BrSampler sampler);

/// Y = exp(Z - sigma2/2) with the same truncated sigma2, so E[Y(t)] = 1.
SpectralPath brown_resnick_Y(const Grid& grid, int truncation, RngStream& rng,
                             BrSampler sampler);

/// Deterministic comb path with exact per-cell masses.
SpectralPath comb_path(const Grid& grid, long n_bumps = 0);

SpectralPath constant_path(const Grid& grid, double level);
SpectralPath bump_path(const Grid& grid, const CompactBumpModel& bump);

/// One spectral path of any catalog model on a window.
SpectralPath sample_path(const SpectralModel& model, const Grid& grid, RngStream& rng);

/// Repeated draws of Y at a fixed, arbitrary point set (d=1). Factorizations
/// and trig tables are prepared once. `force_cholesky` routes Brown-Resnick
/// through the covariance sampler (identical law, far cheaper on small sets).
class PointSampler {
public:
    PointSampler(const SpectralModel& model, std::vector<double> points,
                 bool force_cholesky = false);
    std::vector<double> sample(RngStream& rng) const;
    const std::vector<double>& points() const { return points_; }

private:
    struct BrState {
        int truncation;
        BrSampler sampler;
        std::shared_ptr<GaussianPathSampler> chol;
        std::vector<double> sigma2;  // drift at each point
    };
    struct MixState {
        std::vector<double> cumulative;
        std::vector<PointSampler> parts;
    };
    std::vector<double> points_;
    std::variant<std::vector<double>, BrState, MixState> state_;  // deterministic values, BR, mixture
};

} // namespace maxstab
