#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "maxstab/grid.hpp"

namespace maxstab {

enum class ConeAxis { hopf, neveu };
enum class ConeLabel { conservative, dissipative, positive, null_recurrent, inconclusive };
enum class ConeTestKind { integral, decay, sup_local, cesaro, weighted };

const char* to_string(ConeAxis axis);
const char* to_string(ConeLabel label);
const char* to_string(ConeTestKind kind);

/// Finite-window evidence can never decide a limit, so every test may return
/// `inconclusive`. eps_abs and floor are applied relative to the path's sup
/// over the window: the cones are scale-invariant, so the thresholds must be
/// too.
struct ConeThresholds {
    double eps_rel = 0.01;
    double eps_abs = 0.05;
    int growth_window = 4;
    double floor = 0.1;
};

struct TraceRow {
    double r = 0.0;
    double integral = 0.0;     // I_r, quadrature over B_r
    double cesaro = 0.0;       // A_r = I_r / lambda(B_r)
    double annulus_sup = 0.0;  // sup over B_r \ B_{r/2}
};

struct ConeVerdict {
    ConeAxis axis = ConeAxis::hopf;
    ConeTestKind test = ConeTestKind::integral;
    ConeLabel label = ConeLabel::inconclusive;
    std::vector<TraceRow> trace;
    ConeThresholds thresholds;
    double path_sup = 0.0;  // normalizer used for the absolute thresholds
    std::string note;
};

/// Positive, integrable weight on the line, non-increasing in |x|.
/// (The classical statement of the weighted test asks for non-decreasing
/// weights that are also integrable, which no positive function satisfies;
/// non-increasing is the usable reading and the discrepancy is documented.)
struct WeightFunction {
    std::function<double(double)> w;
    std::string descriptor;

    static WeightFunction exponential(double alpha = 1.0);
    static WeightFunction power(double exponent = 2.0);
};

/// Dyadic ladder 2^3 .. 2^10 clipped to the radius the window covers.
std::vector<double> default_radii(const Grid& grid);

/// Hopf axis via the integral criterion: I_r stabilizing (trailing relative
/// increments below eps_rel) reads dissipative; A_r holding above
/// floor * sup reads conservative.
ConeVerdict integral_test(const SpectralPath& path, const std::vector<double>& radii,
                          const ConeThresholds& thr = {});

/// Hopf axis via path decay: annulus sups vanishing read dissipative (the
/// "f -> 0" cone); sups persisting above eps_abs * sup read conservative.
ConeVerdict decay_test(const SpectralPath& path, const std::vector<double>& radii,
                       const ConeThresholds& thr = {});

/// Neveu axis: A_r -> 0 (or a clearly negative log-log slope) reads null;
/// A_r stabilizing above floor * sup reads positive.
ConeVerdict cesaro_test(const SpectralPath& path, const std::vector<double>& radii,
                        const ConeThresholds& thr = {});

/// Integral test applied to the moving-max smoothed path (continuous grids
/// only; vacuous on lattices and rejected there). Dissipative means the
/// sup-smoothed integral converges.
ConeVerdict sup_local_test(const SpectralPath& path, double k_halfwidth,
                           const std::vector<double>& radii,
                           const ConeThresholds& thr = {});

/// Weighted integral evidence on the Neveu axis (d=1 only): convergence of
/// the w-weighted integral is evidence toward null, divergence toward
/// positive. Advisory: reported alongside cesaro_test, never overriding it.
ConeVerdict weighted_test(const SpectralPath& path, const WeightFunction& weight,
                          const std::vector<double>& radii,
                          const ConeThresholds& thr = {});

/// The full battery on one path. The decomposition labels are taken from the
/// integral test (hopf) and the cesaro test (neveu); the decay test is kept
/// for the moving-maximum criterion, and a disagreement between the integral
/// and decay hopf readings is surfaced, never silently resolved.
struct PathClassification {
    ConeVerdict hopf_integral;
    ConeVerdict hopf_decay;
    ConeVerdict neveu_cesaro;
    std::optional<ConeVerdict> sup_local;
    std::optional<ConeVerdict> weighted;

    ConeLabel hopf_label() const { return hopf_integral.label; }
    ConeLabel neveu_label() const { return neveu_cesaro.label; }
    bool conflict() const {
        return (hopf_integral.label == ConeLabel::dissipative &&
                hopf_decay.label == ConeLabel::conservative) ||
               (hopf_integral.label == ConeLabel::conservative &&
                hopf_decay.label == ConeLabel::dissipative);
    }
};

struct ClassifyOptions {
    ConeThresholds thresholds;
    std::vector<double> radii;          // empty -> default_radii(grid)
    bool run_sup_local = true;          // continuous grids only
    double sup_local_halfwidth = 0.5;
    bool run_weighted = false;
    WeightFunction weight = WeightFunction::exponential();
};

PathClassification classify_path(const SpectralPath& path, const ClassifyOptions& opts = {});

} // namespace maxstab
