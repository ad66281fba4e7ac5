#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "maxstab/catalog.hpp"
#include "maxstab/cones.hpp"
#include "maxstab/simulate.hpp"
#include "maxstab/stats.hpp"

namespace maxstab {

enum class TriState { supported, rejected, inconclusive };
const char* to_string(TriState v);

struct LagEstimate {
    double lag = 0.0;
    double mean = 0.0;
    double se = 0.0;
};

/// m_hat(x) = sample mean of Y(x) ^ Y(0) over independent spectral paths.
/// Vanishing as x -> infinity characterizes mixing.
std::vector<LagEstimate> est_min_expectation(const SpectralModel& model,
                                             const std::vector<double>& lags,
                                             std::size_t n_reps, RngStream rng,
                                             unsigned threads = 1);

struct IdentityEstimate {
    double lag = 0.0;
    double lhs = 0.0;     // spectral route: E[Y(x) ^ Y(0)]
    double lhs_se = 0.0;
    double rhs = 0.0;     // field route: 2 + log P[eta(x) <= 1, eta(0) <= 1]
    double rhs_se = 0.0;
    double gap = 0.0;
    double pooled_se = 0.0;
    std::size_t n_reps = 0;
    bool exact_fields = false;  // truncation flag of the field route
};

struct IdentityOptions {
    std::size_t n_atoms = 2000;   // fixed_n depth for unbounded models
    unsigned threads = 1;
    double scale_tolerance = 1e-6;
};

/// The spectral/field cross-identity at one lag; both routes estimated
/// independently. Requires unit marginal field scale at 0 and at the lag (a
/// rescaling hint is raised otherwise). Translated-shape models evaluate the
/// spectral route as the translation-mixed integral of min(Z(x-y), Z(-y)),
/// which is the spectral law of the stationary moving-maximum field.
IdentityEstimate est_bivariate_identity(const SpectralModel& model, double lag,
                                        std::size_t n_reps, RngStream rng,
                                        const IdentityOptions& opts = {});

struct CesaroCurve {
    std::vector<double> radii;
    std::vector<double> mean_curve;    // (1/lambda(B_r)) integral of m_hat over B_r
    std::vector<double> median_A;      // per-path Cesaro averages, median
    std::vector<double> decile_lo;     // 10%
    std::vector<double> decile_hi;     // 90%
    std::size_t n_reps = 0;
};

/// Cesaro decay evidence for ergodicity: the mean curve estimates the
/// expected-min criterion, the per-path quantiles the almost-sure one.
CesaroCurve est_cesaro_criterion(const SpectralModel& model, const Grid& grid,
                                 const std::vector<double>& radii, std::size_t n_reps,
                                 RngStream rng, unsigned threads = 1);

struct ThetaEstimate {
    double z = 0.0;
    double theta = 0.0;
    Interval wilson;        // interval for P[sup <= z]
    double theta_lo = 0.0;  // theta transformed from the Wilson interval
    double theta_hi = 0.0;
    bool usable = true;     // false when P_hat is 0 (log singularity)
    std::size_t successes = 0;
};

/// theta_hat(z) = -z log P_hat[sup_K eta <= z] from per-replication sups.
std::vector<ThetaEstimate> est_theta(const std::vector<double>& sup_over_K,
                                     const std::vector<double>& z_values);

struct MaxStabilityResult {
    double point = 0.0;
    double ks = 0.0;
};

/// KS distance between (1/n) max of n independent fields and one direct
/// simulation, per evaluation point.
std::vector<MaxStabilityResult> max_stability_test(const PointFieldSimulator& sim,
                                                   unsigned n_fold, std::size_t n_reps,
                                                   RngStream rng, unsigned threads = 1);

struct MixingCell {
    double lag = 0.0;
    double delta = 0.0;
    double p = 0.0;  // P_hat[Y(lag) > delta]
    Interval wilson;
};

/// Tail-probability table over a lag ladder (dyadic and generic lags mixed)
/// and a delta sweep; decay across the ladder is the in-probability criterion.
std::vector<MixingCell> est_tail_probabilities(const SpectralModel& model,
                                               const std::vector<double>& lags,
                                               const std::vector<double>& deltas,
                                               std::size_t n_reps, RngStream rng,
                                               unsigned threads = 1);

/// Dyadic union generic mixing lag ladder up to `max_lag`.
std::vector<double> default_mixing_lags(double max_lag);

struct VerdictInputs {
    // per-path classification tallies over a replication batch
    std::size_t n_paths = 0;
    std::size_t hopf_integral_dissipative = 0;
    std::size_t hopf_integral_conservative = 0;
    std::size_t decay_dissipative = 0;
    std::size_t decay_conservative = 0;
    std::size_t neveu_null = 0;
    std::size_t neveu_positive = 0;
    // Cesaro medians across the radius ladder
    std::vector<double> cesaro_median;
    // tail probability table
    std::vector<MixingCell> tail;
    // local-boundedness proxy: per-replication sup over the unit subwindow
    // and the field value at the origin; a unit window carrying far more
    // extremal mass than one point flags unbounded local behaviour
    std::vector<double> unit_sup_samples;
    std::vector<double> origin_samples;
};

struct VerdictThresholds {
    double ergodic_drop = 0.7;        // supported when median falls below this ratio
    double ergodic_flat = 0.95;       // rejected when it stays above this ratio
    double mixing_supported_p = 0.05; // tail probabilities must fall below
    double mixing_rejected_p = 0.2;   // persistent mass at the largest lags
    double m3_decay_rate = 0.95;      // fraction of paths vanishing at infinity
    double proxy_ratio = 10.0;        // unit-window extremal mass flagged divergent
};

struct Verdicts {
    TriState ergodic = TriState::inconclusive;
    TriState mixing = TriState::inconclusive;
    TriState m3 = TriState::inconclusive;
    bool conflict = false;
    std::vector<std::string> evidence;
};

/// Tri-state verdicts with the evidence rows that produced them. A
/// disagreement between the integral and decay readings (the unbounded-comb
/// signature) forces every verdict to inconclusive with the conflict
/// surfaced.
Verdicts make_verdicts(const VerdictInputs& in, const VerdictThresholds& thr = {});

/// Everything the report file carries.
struct DiagnosticReport {
    std::string model_name;
    std::vector<LagEstimate> min_expectation;
    std::vector<IdentityEstimate> identity;
    CesaroCurve cesaro;
    std::vector<ThetaEstimate> theta;
    std::vector<MixingCell> tail;
    Verdicts verdicts;
    std::uint64_t seed = 0;
    std::size_t n_reps = 0;
    bool truncation_exact = true;
};

} // namespace maxstab
