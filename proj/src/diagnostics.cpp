#include "maxstab/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "maxstab/errors.hpp"
#include "maxstab/parallel.hpp"

namespace maxstab {

const char* to_string(TriState v) {
    switch (v) {
        case TriState::supported: return "supported";
        case TriState::rejected: return "rejected";
        case TriState::inconclusive: return "inconclusive";
    }
    return "?";
}

namespace {

constexpr std::uint64_t kRepTag = 0x51;
constexpr std::uint64_t kFoldTag = 0x52;
constexpr std::uint64_t kShapeTag = 0x53;

std::string fmt(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6g", x);
    return buf;
}

} // namespace

std::vector<LagEstimate> est_min_expectation(const SpectralModel& model,
                                             const std::vector<double>& lags,
                                             std::size_t n_reps, RngStream rng,
                                             unsigned threads) {
    if (n_reps < 2) throw std::invalid_argument("est_min_expectation: n_reps too small");
    std::vector<double> points;
    points.push_back(0.0);
    points.insert(points.end(), lags.begin(), lags.end());
    const PointSampler sampler(model, points, /*force_cholesky=*/true);

    // one row per replication, reduced in index order afterwards
    std::vector<std::vector<double>> mins(n_reps);
    parallel_for(n_reps, threads, [&](std::size_t i) {
        RngStream rep = rng.derive(kRepTag, i);
        const std::vector<double> y = sampler.sample(rep);
        std::vector<double> row(lags.size());
        for (std::size_t k = 0; k < lags.size(); ++k) row[k] = std::min(y[k + 1], y[0]);
        mins[i] = std::move(row);
    });

    std::vector<LagEstimate> out(lags.size());
    std::vector<double> column(n_reps);
    for (std::size_t k = 0; k < lags.size(); ++k) {
        for (std::size_t i = 0; i < n_reps; ++i) column[i] = mins[i][k];
        const MeanSE m = mean_se(column);
        out[k] = LagEstimate{lags[k], m.mean, m.se};
    }
    return out;
}

namespace {

bool contains_shape(const SpectralModel& model) {
    if (model.is_shape()) return true;
    if (const auto* mix = std::get_if<MixtureModel>(&model.variant))
        for (const auto& p : mix->parts)
            if (contains_shape(p)) return true;
    return false;
}

} // namespace

IdentityEstimate est_bivariate_identity(const SpectralModel& model, double lag,
                                        std::size_t n_reps, RngStream rng,
                                        const IdentityOptions& opts) {
    if (n_reps < 100) throw std::invalid_argument("est_bivariate_identity: n_reps >= 100");
    IdentityEstimate out;
    out.lag = lag;
    out.n_reps = n_reps;

    const bool shape_model = model.is_shape();
    if (!shape_model && contains_shape(model))
        throw std::invalid_argument(
            "est_bivariate_identity: mixtures containing translated shapes are not supported");

    const double h = 0.125;  // position spacing for shape models
    SimConfig sim;

    if (shape_model) {
        const Grid quad_grid = Grid::continuous1d(1.0, h);
        const ShapeLaw law = shape_law_from_model(model, quad_grid);
        if (std::abs(law.mean_integral - 1.0) > opts.scale_tolerance)
            throw std::invalid_argument(
                "est_bivariate_identity: field scale is " + fmt(law.mean_integral) +
                ", not 1; rescale the shape by 1/" + fmt(law.mean_integral));

        // spectral route: translation-mixed quadrature of min(Z(lag-y), Z(-y))
        const double span = std::max(lag, 0.0) + law.support_radius + 1.0;
        const long n_pos = static_cast<long>(std::ceil(span / h));
        std::size_t n_draws = 500;
        std::vector<double> draws(n_draws);
        for (std::size_t d = 0; d < n_draws; ++d) {
            RngStream shape_rng = rng.derive(kShapeTag, d);
            const ShapeDraw z = law.draw(shape_rng);
            double acc = 0.0;
            for (long j = -n_pos; j <= n_pos; ++j) {
                const double y = static_cast<double>(j) * h;
                acc += std::min(z.eval(lag - y, 0.0), z.eval(-y, 0.0));
            }
            draws[d] = acc * h;
        }
        const MeanSE lhs = mean_se(draws);
        out.lhs = lhs.mean;
        out.lhs_se = lhs.se;

        sim.mode = Truncation::Mode::threshold;
        PointFieldSimulator fields(law, {0.0, lag}, law.support_radius + 1.0, h,
                                   /*position_lattice=*/false, sim);
        std::vector<std::uint8_t> hits(n_reps);
        parallel_for(n_reps, opts.threads, [&](std::size_t i) {
            const std::vector<double> eta = fields.simulate(rng.derive(kRepTag, i));
            hits[i] = (eta[0] <= 1.0 && eta[1] <= 1.0) ? 1 : 0;
        });
        std::size_t successes = 0;
        for (auto hit : hits) successes += hit;
        const double p = static_cast<double>(successes) / static_cast<double>(n_reps);
        if (!(p > 0.0))
            throw NumericError("est_bivariate_identity: joint probability estimate is 0");
        out.rhs = 2.0 + std::log(p);
        out.rhs_se = std::sqrt(p * (1.0 - p) / static_cast<double>(n_reps)) / p;
        out.exact_fields = true;
    } else {
        for (double x : {0.0, lag}) {
            const double scale = model.mean_at(x);
            if (std::abs(scale - 1.0) > opts.scale_tolerance)
                throw std::invalid_argument(
                    "est_bivariate_identity: E[Y(" + fmt(x) + ")] = " + fmt(scale) +
                    ", not 1; rescale the model by 1/" + fmt(scale));
        }

        const PointSampler sampler(model, {0.0, lag}, /*force_cholesky=*/true);
        std::vector<double> mins(n_reps);
        parallel_for(n_reps, opts.threads, [&](std::size_t i) {
            RngStream rep = rng.derive(kRepTag + 1, i);
            const std::vector<double> y = sampler.sample(rep);
            mins[i] = std::min(y[0], y[1]);
        });
        const MeanSE lhs = mean_se(mins);
        out.lhs = lhs.mean;
        out.lhs_se = lhs.se;

        const bool bounded = model.sup_bound().has_value();
        sim.mode = bounded ? Truncation::Mode::threshold : Truncation::Mode::fixed_n;
        sim.n_atoms = opts.n_atoms;
        PointFieldSimulator fields(model, {0.0, lag}, sim, /*force_cholesky=*/true);
        std::vector<std::uint8_t> hits(n_reps);
        parallel_for(n_reps, opts.threads, [&](std::size_t i) {
            const std::vector<double> eta = fields.simulate(rng.derive(kRepTag, i));
            hits[i] = (eta[0] <= 1.0 && eta[1] <= 1.0) ? 1 : 0;
        });
        std::size_t successes = 0;
        for (auto hit : hits) successes += hit;
        const double p = static_cast<double>(successes) / static_cast<double>(n_reps);
        if (!(p > 0.0))
            throw NumericError("est_bivariate_identity: joint probability estimate is 0");
        out.rhs = 2.0 + std::log(p);
        out.rhs_se = std::sqrt(p * (1.0 - p) / static_cast<double>(n_reps)) / p;
        out.exact_fields = bounded;
    }

    out.gap = out.lhs - out.rhs;
    out.pooled_se = std::sqrt(out.lhs_se * out.lhs_se + out.rhs_se * out.rhs_se);
    return out;
}

CesaroCurve est_cesaro_criterion(const SpectralModel& model, const Grid& grid,
                                 const std::vector<double>& radii, std::size_t n_reps,
                                 RngStream rng, unsigned threads) {
    if (radii.empty()) throw std::invalid_argument("est_cesaro_criterion: radii required");
    if (radii.back() > grid.covered_radius() + 1e-9)
        throw std::invalid_argument("est_cesaro_criterion: radius exceeds window");

    CesaroCurve out;
    out.radii = radii;
    out.n_reps = n_reps;

    // per-block accumulators keep the reduction order fixed
    const std::size_t block = std::max<std::size_t>(1, n_reps / std::max(1u, threads * 8));
    const std::size_t n_blocks = (n_reps + block - 1) / block;
    std::vector<std::vector<double>> min_sums(n_blocks);
    std::vector<std::vector<std::vector<double>>> a_rows(n_blocks);

    parallel_for(n_blocks, threads, [&](std::size_t b) {
        const std::size_t lo = b * block;
        const std::size_t hi = std::min(n_reps, lo + block);
        std::vector<double> acc(grid.size(), 0.0);
        auto& rows = a_rows[b];
        rows.reserve(hi - lo);
        for (std::size_t i = lo; i < hi; ++i) {
            RngStream rep = rng.derive(kRepTag, i);
            const SpectralPath path = sample_path(model, grid, rep);
            const double y0 = path.values[grid.flat(0)];
            for (std::size_t f = 0; f < acc.size(); ++f)
                acc[f] += std::min(path.values[f], y0);
            const std::vector<double> integrals = box_integrals(path, radii);
            std::vector<double> a(radii.size());
            for (std::size_t k = 0; k < radii.size(); ++k)
                a[k] = integrals[k] / box_measure(grid, radii[k]);
            rows.push_back(std::move(a));
        }
        min_sums[b] = std::move(acc);
    });

    SpectralPath mean_min;
    mean_min.grid = grid;
    mean_min.values.assign(grid.size(), 0.0);
    for (std::size_t b = 0; b < n_blocks; ++b)
        for (std::size_t f = 0; f < mean_min.values.size(); ++f)
            mean_min.values[f] += min_sums[b][f];
    for (auto& v : mean_min.values) v /= static_cast<double>(n_reps);

    const std::vector<double> curve_int = box_integrals(mean_min, radii);
    out.mean_curve.resize(radii.size());
    for (std::size_t k = 0; k < radii.size(); ++k)
        out.mean_curve[k] = curve_int[k] / box_measure(grid, radii[k]);

    std::vector<double> column;
    column.reserve(n_reps);
    for (std::size_t k = 0; k < radii.size(); ++k) {
        column.clear();
        for (const auto& rows : a_rows)
            for (const auto& row : rows) column.push_back(row[k]);
        out.median_A.push_back(quantile(column, 0.5));
        out.decile_lo.push_back(quantile(column, 0.1));
        out.decile_hi.push_back(quantile(column, 0.9));
    }
    return out;
}

std::vector<ThetaEstimate> est_theta(const std::vector<double>& sup_over_K,
                                     const std::vector<double>& z_values) {
    if (sup_over_K.empty()) throw std::invalid_argument("est_theta: no replications");
    std::vector<ThetaEstimate> out;
    const double n = static_cast<double>(sup_over_K.size());
    for (double z : z_values) {
        if (!(z > 0.0)) throw std::invalid_argument("est_theta: z must be > 0");
        ThetaEstimate est;
        est.z = z;
        std::size_t below = 0;
        for (double s : sup_over_K) below += (s <= z);
        est.successes = below;
        est.wilson = wilson_interval(below, sup_over_K.size());
        if (below == 0) {
            est.usable = false;
            est.theta = std::numeric_limits<double>::infinity();
            est.theta_lo = -z * std::log(est.wilson.hi);
            est.theta_hi = std::numeric_limits<double>::infinity();
        } else {
            const double p = static_cast<double>(below) / n;
            est.theta = -z * std::log(p);
            est.theta_lo = est.wilson.hi < 1.0 ? -z * std::log(est.wilson.hi) : 0.0;
            est.theta_hi = est.wilson.lo > 0.0 ? -z * std::log(est.wilson.lo)
                                               : std::numeric_limits<double>::infinity();
        }
        out.push_back(est);
    }
    return out;
}

std::vector<MaxStabilityResult> max_stability_test(const PointFieldSimulator& sim,
                                                   unsigned n_fold, std::size_t n_reps,
                                                   RngStream rng, unsigned threads) {
    if (n_fold < 1) throw std::invalid_argument("max_stability_test: n_fold >= 1");
    const std::size_t n_points = sim.points().size();

    std::vector<std::vector<double>> direct(n_reps), folded(n_reps);
    parallel_for(n_reps, threads, [&](std::size_t i) {
        direct[i] = sim.simulate(rng.derive(kRepTag, i));
        std::vector<double> acc(n_points, 0.0);
        for (unsigned j = 0; j < n_fold; ++j) {
            const std::vector<double> eta =
                sim.simulate(rng.derive(kFoldTag, i * n_fold + j));
            for (std::size_t k = 0; k < n_points; ++k) acc[k] = std::max(acc[k], eta[k]);
        }
        const double inv = 1.0 / static_cast<double>(n_fold);
        for (auto& v : acc) v *= inv;
        folded[i] = std::move(acc);
    });

    std::vector<MaxStabilityResult> out;
    for (std::size_t k = 0; k < n_points; ++k) {
        std::vector<double> a(n_reps), b(n_reps);
        for (std::size_t i = 0; i < n_reps; ++i) {
            a[i] = direct[i][k];
            b[i] = folded[i][k];
        }
        out.push_back({sim.points()[k], ks_distance_two_sample(std::move(a), std::move(b))});
    }
    return out;
}

std::vector<MixingCell> est_tail_probabilities(const SpectralModel& model,
                                               const std::vector<double>& lags,
                                               const std::vector<double>& deltas,
                                               std::size_t n_reps, RngStream rng,
                                               unsigned threads) {
    const PointSampler sampler(model, lags, /*force_cholesky=*/true);
    std::vector<std::vector<std::uint8_t>> over(n_reps);
    parallel_for(n_reps, threads, [&](std::size_t i) {
        RngStream rep = rng.derive(kRepTag, i);
        const std::vector<double> y = sampler.sample(rep);
        std::vector<std::uint8_t> row(lags.size() * deltas.size());
        for (std::size_t k = 0; k < lags.size(); ++k)
            for (std::size_t d = 0; d < deltas.size(); ++d)
                row[k * deltas.size() + d] = y[k] > deltas[d] ? 1 : 0;
        over[i] = std::move(row);
    });

    std::vector<MixingCell> out;
    for (std::size_t k = 0; k < lags.size(); ++k)
        for (std::size_t d = 0; d < deltas.size(); ++d) {
            std::size_t cnt = 0;
            for (std::size_t i = 0; i < n_reps; ++i) cnt += over[i][k * deltas.size() + d];
            MixingCell cell;
            cell.lag = lags[k];
            cell.delta = deltas[d];
            cell.p = static_cast<double>(cnt) / static_cast<double>(n_reps);
            cell.wilson = wilson_interval(cnt, n_reps);
            out.push_back(cell);
        }
    return out;
}

std::vector<double> default_mixing_lags(double max_lag) {
    std::vector<double> lags;
    for (double d = 1.0; d <= max_lag; d *= 2.0) lags.push_back(d);
    for (double g : {3.0, 5.0, 11.0, 23.0, 47.0, 97.0, 199.0, 401.0, 809.0})
        if (g <= max_lag) lags.push_back(g);
    std::sort(lags.begin(), lags.end());
    lags.erase(std::unique(lags.begin(), lags.end()), lags.end());
    return lags;
}

Verdicts make_verdicts(const VerdictInputs& in, const VerdictThresholds& thr) {
    Verdicts out;
    const double n = static_cast<double>(std::max<std::size_t>(in.n_paths, 1));

    const bool integral_dissipative = 2 * in.hopf_integral_dissipative >= in.n_paths;
    const bool decay_conservative = 2 * in.decay_conservative >= in.n_paths;
    out.conflict = in.n_paths > 0 && integral_dissipative && decay_conservative;
    if (out.conflict) {
        out.evidence.push_back(
            "conflict: integral test reads dissipative on " +
            std::to_string(in.hopf_integral_dissipative) + "/" + std::to_string(in.n_paths) +
            " paths while the decay test reads conservative on " +
            std::to_string(in.decay_conservative) + "/" + std::to_string(in.n_paths));
        out.ergodic = out.mixing = out.m3 = TriState::inconclusive;
        return out;
    }

    // ergodic: Cesaro medians across the radius ladder
    if (in.cesaro_median.size() >= 2) {
        const double first = in.cesaro_median.front();
        const double last = in.cesaro_median.back();
        const double ratio = first > 0.0 ? last / first : 0.0;
        bool nonincreasing = true;
        for (std::size_t k = 1; k < in.cesaro_median.size(); ++k)
            if (in.cesaro_median[k] > 1.05 * in.cesaro_median[k - 1]) nonincreasing = false;
        out.evidence.push_back("cesaro median ratio last/first = " + fmt(ratio));
        if (nonincreasing && ratio <= thr.ergodic_drop)
            out.ergodic = TriState::supported;
        else if (ratio >= thr.ergodic_flat)
            out.ergodic = TriState::rejected;
    }

    // mixing: tail of the in-probability table
    if (!in.tail.empty()) {
        double max_lag = 0.0;
        for (const auto& c : in.tail) max_lag = std::max(max_lag, c.lag);
        double worst = 0.0, worst_lag = 0.0, worst_delta = 0.0;
        bool all_below = true;
        for (const auto& c : in.tail) {
            if (c.lag < max_lag / 4.0) continue;
            if (c.p > worst) { worst = c.p; worst_lag = c.lag; worst_delta = c.delta; }
            if (c.p > thr.mixing_supported_p) all_below = false;
        }
        out.evidence.push_back("largest tail probability at lag >= " + fmt(max_lag / 4.0) +
                               ": P[Y(" + fmt(worst_lag) + ") > " + fmt(worst_delta) +
                               "] = " + fmt(worst));
        if (all_below) out.mixing = TriState::supported;
        else if (worst >= thr.mixing_rejected_p) out.mixing = TriState::rejected;
    }

    // moving-maximum representation: path decay rate plus the extremal-mass proxy
    if (in.n_paths > 0) {
        const double decay_rate = static_cast<double>(in.decay_dissipative) / n;
        out.evidence.push_back("paths vanishing at infinity (decay test): " + fmt(decay_rate));
        bool proxy_divergent = false;
        if (!in.unit_sup_samples.empty() && !in.origin_samples.empty()) {
            const double med_origin = median(in.origin_samples);
            const double ratio =
                med_origin > 0.0 ? median(in.unit_sup_samples) / med_origin : 0.0;
            proxy_divergent = ratio > thr.proxy_ratio;
            out.evidence.push_back("unit-window extremal mass ratio = " + fmt(ratio));
        }
        if (decay_rate >= thr.m3_decay_rate && !proxy_divergent)
            out.m3 = TriState::supported;
        else if (2 * in.decay_conservative >= in.n_paths || proxy_divergent)
            out.m3 = TriState::rejected;
    }
    return out;
}

} // namespace maxstab
