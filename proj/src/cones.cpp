#include "maxstab/cones.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace maxstab {

const char* to_string(ConeAxis axis) {
    return axis == ConeAxis::hopf ? "hopf" : "neveu";
}

const char* to_string(ConeLabel label) {
    switch (label) {
        case ConeLabel::conservative: return "conservative";
        case ConeLabel::dissipative: return "dissipative";
        case ConeLabel::positive: return "positive";
        case ConeLabel::null_recurrent: return "null";
        case ConeLabel::inconclusive: return "inconclusive";
    }
    return "?";
}

const char* to_string(ConeTestKind kind) {
    switch (kind) {
        case ConeTestKind::integral: return "integral";
        case ConeTestKind::decay: return "decay";
        case ConeTestKind::sup_local: return "sup_local";
        case ConeTestKind::cesaro: return "cesaro";
        case ConeTestKind::weighted: return "weighted";
    }
    return "?";
}

WeightFunction WeightFunction::exponential(double alpha) {
    if (!(alpha > 0.0)) throw std::invalid_argument("exponential weight: alpha > 0");
    return WeightFunction{[alpha](double x) { return std::exp(-alpha * std::abs(x)); },
                          "exp(-" + std::to_string(alpha) + "|x|)"};
}

WeightFunction WeightFunction::power(double exponent) {
    if (!(exponent > 1.0)) throw std::invalid_argument("power weight: exponent > 1");
    return WeightFunction{[exponent](double x) { return std::pow(1.0 + std::abs(x), -exponent); },
                          "(1+|x|)^-" + std::to_string(exponent)};
}

std::vector<double> default_radii(const Grid& grid) {
    std::vector<double> out;
    const double covered = grid.covered_radius();
    double lo = 8.0;
    // small windows fall back to a halving ladder so at least 4 radii fit
    while (lo > grid.spacing && covered < 8.0 * lo) lo /= 2.0;
    for (double r = lo; r <= 1024.0 && r <= covered + 1e-9; r *= 2.0)
        out.push_back(r);
    return out;
}

namespace {

constexpr double kTiny = 1e-300;

void validate_inputs(const SpectralPath& path, const std::vector<double>& radii,
                     const ConeThresholds& thr, double margin = 0.0) {
    if (path.is_zero())
        throw std::invalid_argument("cone test: zero path is excluded from classification");
    if (radii.size() < 4)
        throw std::invalid_argument("cone test: at least 4 radii required");
    if (static_cast<int>(radii.size()) < thr.growth_window || thr.growth_window < 2)
        throw std::invalid_argument("cone test: growth window must fit the radii ladder");
    for (std::size_t i = 0; i + 1 < radii.size(); ++i)
        if (!(radii[i] < radii[i + 1]))
            throw std::invalid_argument("cone test: radii must be strictly increasing");
    if (!(radii.front() > 0.0))
        throw std::invalid_argument("cone test: radii must be positive");
    if (radii.back() > path.grid.covered_radius() - margin + 1e-9)
        throw std::invalid_argument("cone test: largest radius exceeds the window");
}

std::vector<TraceRow> build_trace(const SpectralPath& path, const std::vector<double>& radii) {
    std::vector<TraceRow> rows(radii.size());
    const std::vector<double> integrals = box_integrals(path, radii);
    for (std::size_t i = 0; i < radii.size(); ++i) {
        rows[i].r = radii[i];
        rows[i].integral = integrals[i];
        rows[i].cesaro = integrals[i] / box_measure(path.grid, radii[i]);
        rows[i].annulus_sup = annulus_sup(path, radii[i]);
    }
    return rows;
}

// increments within the last `window` radii (window - 1 of them)
bool trailing_increments_below(const std::vector<TraceRow>& rows, int window, double eps_rel) {
    const std::size_t m = rows.size();
    for (std::size_t j = m - static_cast<std::size_t>(window) + 1; j < m; ++j) {
        const double prev = rows[j - 1].integral;
        const double inc = rows[j].integral - prev;
        if (inc > eps_rel * std::max(prev, kTiny)) return false;
    }
    return true;
}

double loglog_slope(const std::vector<TraceRow>& rows, std::size_t from) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    std::size_t n = 0;
    for (std::size_t j = from; j < rows.size(); ++j, ++n) {
        const double x = std::log(rows[j].r);
        const double y = std::log(std::max(rows[j].cesaro, kTiny));
        sx += x; sy += y; sxx += x * x; sxy += x * y;
    }
    const double denom = static_cast<double>(n) * sxx - sx * sx;
    if (denom == 0.0) return 0.0;
    return (static_cast<double>(n) * sxy - sx * sy) / denom;
}

ConeVerdict make_verdict(ConeAxis axis, ConeTestKind kind, ConeLabel label,
                         std::vector<TraceRow> rows, const ConeThresholds& thr,
                         double sup, std::string note = {}) {
    ConeVerdict v;
    v.axis = axis;
    v.test = kind;
    v.label = label;
    v.trace = std::move(rows);
    v.thresholds = thr;
    v.path_sup = sup;
    v.note = std::move(note);
    return v;
}

ConeVerdict integral_style_verdict(ConeTestKind kind, const SpectralPath& path,
                                   const std::vector<double>& radii,
                                   const ConeThresholds& thr) {
    auto rows = build_trace(path, radii);
    const double sup = path.max_value();
    const int gw = thr.growth_window;

    if (trailing_increments_below(rows, gw, thr.eps_rel))
        return make_verdict(ConeAxis::hopf, kind, ConeLabel::dissipative,
                            std::move(rows), thr, sup);

    bool above_floor = true;
    for (std::size_t j = rows.size() - static_cast<std::size_t>(gw); j < rows.size(); ++j)
        if (rows[j].cesaro < thr.floor * sup) { above_floor = false; break; }
    if (above_floor)
        return make_verdict(ConeAxis::hopf, kind, ConeLabel::conservative,
                            std::move(rows), thr, sup);

    return make_verdict(ConeAxis::hopf, kind, ConeLabel::inconclusive,
                        std::move(rows), thr, sup,
                        "integral neither stabilized nor proportional to volume");
}

} // namespace

ConeVerdict integral_test(const SpectralPath& path, const std::vector<double>& radii,
                          const ConeThresholds& thr) {
    validate_inputs(path, radii, thr);
    return integral_style_verdict(ConeTestKind::integral, path, radii, thr);
}

ConeVerdict decay_test(const SpectralPath& path, const std::vector<double>& radii,
                       const ConeThresholds& thr) {
    validate_inputs(path, radii, thr);
    auto rows = build_trace(path, radii);
    const double sup = path.max_value();
    const double cut = thr.eps_abs * sup;
    const std::size_t m = rows.size();

    const double s_last = rows[m - 1].annulus_sup;
    const double s_prev = rows[m - 2].annulus_sup;
    if (s_last < cut && s_prev < cut && s_last <= s_prev + 1e-12 * sup)
        return make_verdict(ConeAxis::hopf, ConeTestKind::decay, ConeLabel::dissipative,
                            std::move(rows), thr, sup);

    const int gw = thr.growth_window;
    int hits = 0;
    for (std::size_t j = m - static_cast<std::size_t>(gw); j < m; ++j)
        if (rows[j].annulus_sup >= cut) ++hits;
    if (2 * hits >= gw)
        return make_verdict(ConeAxis::hopf, ConeTestKind::decay, ConeLabel::conservative,
                            std::move(rows), thr, sup);

    return make_verdict(ConeAxis::hopf, ConeTestKind::decay, ConeLabel::inconclusive,
                        std::move(rows), thr, sup, "annulus sups neither vanish nor persist");
}

ConeVerdict cesaro_test(const SpectralPath& path, const std::vector<double>& radii,
                        const ConeThresholds& thr) {
    validate_inputs(path, radii, thr);
    auto rows = build_trace(path, radii);
    const double sup = path.max_value();
    const std::size_t m = rows.size();
    const std::size_t from = m - static_cast<std::size_t>(thr.growth_window);

    double lo = rows[from].cesaro, hi = rows[from].cesaro;
    bool decreasing = true;
    for (std::size_t j = from; j < m; ++j) {
        lo = std::min(lo, rows[j].cesaro);
        hi = std::max(hi, rows[j].cesaro);
        if (j > from && rows[j].cesaro >= rows[j - 1].cesaro) decreasing = false;
    }

    if (lo < thr.eps_abs * sup || (decreasing && loglog_slope(rows, from) < -0.1))
        return make_verdict(ConeAxis::neveu, ConeTestKind::cesaro, ConeLabel::null_recurrent,
                            std::move(rows), thr, sup);

    if (hi > 0.0 && (hi - lo) <= thr.eps_rel * hi && rows[m - 1].cesaro >= thr.floor * sup)
        return make_verdict(ConeAxis::neveu, ConeTestKind::cesaro, ConeLabel::positive,
                            std::move(rows), thr, sup);

    return make_verdict(ConeAxis::neveu, ConeTestKind::cesaro, ConeLabel::inconclusive,
                        std::move(rows), thr, sup, "cesaro average neither vanishing nor settled");
}

ConeVerdict sup_local_test(const SpectralPath& path, double k_halfwidth,
                           const std::vector<double>& radii, const ConeThresholds& thr) {
    if (path.grid.lattice)
        throw std::invalid_argument("sup_local_test: vacuous on lattice paths");
    if (path.grid.spacing > k_halfwidth / 4.0 + 1e-12)
        throw std::invalid_argument("sup_local_test: grid spacing must be <= halfwidth/4");
    validate_inputs(path, radii, thr, k_halfwidth);
    SpectralPath smoothed = sup_smooth(path, k_halfwidth);
    ConeVerdict v = integral_style_verdict(ConeTestKind::sup_local, smoothed, radii, thr);
    if (v.label == ConeLabel::conservative)
        v.note = "sup-smoothed integral grows with the window";
    return v;
}

ConeVerdict weighted_test(const SpectralPath& path, const WeightFunction& weight,
                          const std::vector<double>& radii, const ConeThresholds& thr) {
    if (path.grid.dim != 1)
        throw std::invalid_argument("weighted_test: d = 1 only");
    validate_inputs(path, radii, thr);

    SpectralPath weighted;
    weighted.grid = path.grid;
    weighted.values.resize(path.values.size());
    if (path.has_mass()) weighted.cell_mass.resize(path.cell_mass.size());
    for (long i = path.grid.lo[0]; i <= path.grid.hi[0]; ++i) {
        const std::size_t f = path.grid.flat(i);
        const double wx = weight.w(path.grid.coord(i));
        if (!(wx > 0.0) || !std::isfinite(wx))
            throw std::invalid_argument("weighted_test: weight must be positive and finite");
        weighted.values[f] = path.values[f] * wx;
        if (path.has_mass()) weighted.cell_mass[f] = path.cell_mass[f] * wx;
    }

    auto rows = build_trace(weighted, radii);
    const double sup = path.max_value();
    const int gw = thr.growth_window;

    ConeLabel label = ConeLabel::inconclusive;
    std::string note = "weighted evidence (advisory, " + weight.descriptor + ")";
    if (trailing_increments_below(rows, gw, thr.eps_rel)) {
        label = ConeLabel::null_recurrent;
        note += ": weighted integral converged";
    } else {
        bool all_growing = true;
        for (std::size_t j = rows.size() - static_cast<std::size_t>(gw) + 1; j < rows.size();
             ++j) {
            const double prev = rows[j - 1].integral;
            if (rows[j].integral - prev <= thr.eps_rel * std::max(prev, kTiny)) {
                all_growing = false;
                break;
            }
        }
        if (all_growing) {
            label = ConeLabel::positive;
            note += ": weighted integral still growing";
        }
    }
    return make_verdict(ConeAxis::neveu, ConeTestKind::weighted, label,
                        std::move(rows), thr, sup, note);
}

PathClassification classify_path(const SpectralPath& path, const ClassifyOptions& opts) {
    std::vector<double> radii = opts.radii.empty() ? default_radii(path.grid) : opts.radii;
    PathClassification out;
    out.hopf_integral = integral_test(path, radii, opts.thresholds);
    out.hopf_decay = decay_test(path, radii, opts.thresholds);
    out.neveu_cesaro = cesaro_test(path, radii, opts.thresholds);

    if (opts.run_sup_local && !path.grid.lattice) {
        std::vector<double> clipped;
        const double limit = path.grid.covered_radius() - opts.sup_local_halfwidth + 1e-9;
        for (double r : radii)
            if (r <= limit) clipped.push_back(r);
        if (static_cast<int>(clipped.size()) >= std::max(4, opts.thresholds.growth_window))
            out.sup_local = sup_local_test(path, opts.sup_local_halfwidth, clipped,
                                           opts.thresholds);
    }
    if (opts.run_weighted && path.grid.dim == 1)
        out.weighted = weighted_test(path, opts.weight, radii, opts.thresholds);
    return out;
}

} // namespace maxstab
