#include "maxstab/catalog.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "maxstab/errors.hpp"

namespace maxstab {

double sigma2_series(double t, int K) {
    if (K < 1) throw std::invalid_argument("sigma2_series: K >= 1 required");
    double acc = 0.0;
    double denom = 2.0;
    for (int k = 1; k <= K; ++k, denom *= 2.0)
        acc += 1.0 - std::cos(2.0 * M_PI * t / denom);
    return acc;
}

double sigma2_tail_bound(double t, int K) {
    // sum_{k>K} (2 pi t / 2^k)^2 / 2 = (2 pi t)^2 / (6 * 4^K)
    const double a = 2.0 * M_PI * t;
    return a * a / (6.0 * std::pow(4.0, K));
}

std::vector<double> sigma2_growth_scan(int limit, int extra_terms) {
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(std::max(limit, 0)));
    for (int n = 1; n <= limit; ++n)
        out.push_back(sigma2_series(std::pow(2.0, n) / 3.0, n + extra_terms));
    return out;
}

SpectralModel SpectralModel::constant(double level) {
    if (!(level > 0.0)) throw std::invalid_argument("constant model: level must be > 0");
    return SpectralModel{ConstantModel{level}};
}

SpectralModel SpectralModel::brown_resnick(int truncation, BrSampler sampler) {
    if (truncation < 1) throw std::invalid_argument("brown_resnick: truncation >= 1");
    return SpectralModel{BrownResnickModel{truncation, sampler}};
}

SpectralModel SpectralModel::compact_bump(BumpKind kind, double support_radius, double height) {
    if (!(support_radius > 0.0) || !(height > 0.0))
        throw std::invalid_argument("compact_bump: support radius and height must be > 0");
    return SpectralModel{CompactBumpModel{kind, support_radius, height}};
}

SpectralModel SpectralModel::comb(long n_bumps) {
    if (n_bumps < 0) throw std::invalid_argument("comb: n_bumps must be >= 0");
    return SpectralModel{CombModel{n_bumps}};
}

SpectralModel SpectralModel::mixture(std::vector<double> weights,
                                     std::vector<SpectralModel> parts) {
    if (weights.size() != parts.size() || parts.empty())
        throw std::invalid_argument("mixture: weights and parts must match and be non-empty");
    double total = 0.0;
    for (double w : weights) {
        if (!(w >= 0.0)) throw std::invalid_argument("mixture: weights must be >= 0");
        total += w;
    }
    if (!(total > 0.0)) throw std::invalid_argument("mixture: weights sum to zero");
    for (auto& w : weights) w /= total;
    return SpectralModel{MixtureModel{std::move(weights), std::move(parts)}};
}

bool SpectralModel::is_deterministic() const {
    return std::visit(
        [](const auto& m) -> bool {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, ConstantModel> ||
                          std::is_same_v<T, CompactBumpModel> ||
                          std::is_same_v<T, CombModel>)
                return true;
            else if constexpr (std::is_same_v<T, MixtureModel>)
                return m.parts.size() == 1 && m.parts[0].is_deterministic();
            else
                return false;
        },
        variant);
}

bool SpectralModel::is_shape() const {
    return std::holds_alternative<CompactBumpModel>(variant) ||
           std::holds_alternative<CombModel>(variant);
}

std::string SpectralModel::name() const {
    return std::visit(
        [](const auto& m) -> std::string {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, ConstantModel>) return "constant";
            else if constexpr (std::is_same_v<T, BrownResnickModel>) return "brown_resnick";
            else if constexpr (std::is_same_v<T, CompactBumpModel>) return "compact_bump";
            else if constexpr (std::is_same_v<T, CombModel>) return "comb";
            else return "mixture";
        },
        variant);
}

namespace {

long comb_bumps_for(const CombModel& comb, const Grid& grid) {
    if (comb.n_bumps > 0) return comb.n_bumps;
    return static_cast<long>(std::floor(grid.covered_radius())) + 1;
}

long comb_bumps_default(const CombModel& comb) {
    // Point queries without a grid: treat the comb as fully extended.
    return comb.n_bumps > 0 ? comb.n_bumps : (1L << 21);
}

} // namespace

double SpectralModel::mean_at(double x) const {
    return std::visit(
        [&](const auto& m) -> double {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, ConstantModel>) return m.level;
            else if constexpr (std::is_same_v<T, BrownResnickModel>) return 1.0;
            else if constexpr (std::is_same_v<T, CompactBumpModel>) return bump_value(m, x);
            else if constexpr (std::is_same_v<T, CombModel>) return comb_value(x, comb_bumps_default(m));
            else {
                double acc = 0.0;
                for (std::size_t i = 0; i < m.parts.size(); ++i)
                    acc += m.weights[i] * m.parts[i].mean_at(x);
                return acc;
            }
        },
        variant);
}

double SpectralModel::mean_at(const std::array<double, 2>& x) const {
    return std::visit(
        [&](const auto& m) -> double {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, ConstantModel>) return m.level;
            else if constexpr (std::is_same_v<T, CompactBumpModel>) return bump_value2(m, x[0], x[1]);
            else if constexpr (std::is_same_v<T, MixtureModel>) {
                double acc = 0.0;
                for (std::size_t i = 0; i < m.parts.size(); ++i)
                    acc += m.weights[i] * m.parts[i].mean_at(x);
                return acc;
            } else {
                throw std::invalid_argument("model '" + SpectralModel{T{m}}.name() +
                                            "' is one-dimensional");
            }
        },
        variant);
}

std::optional<double> SpectralModel::sup_bound() const {
    return std::visit(
        [](const auto& m) -> std::optional<double> {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, ConstantModel>) return m.level;
            else if constexpr (std::is_same_v<T, BrownResnickModel>) return std::nullopt;
            else if constexpr (std::is_same_v<T, CompactBumpModel>) return m.height;
            else if constexpr (std::is_same_v<T, CombModel>)
                return comb_sup(comb_bumps_default(m));
            else {
                double bound = 0.0;
                for (const auto& p : m.parts) {
                    auto b = p.sup_bound();
                    if (!b) return std::nullopt;
                    bound = std::max(bound, *b);
                }
                return bound;
            }
        },
        variant);
}

double SpectralModel::support_radius() const {
    return std::visit(
        [](const auto& m) -> double {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, CompactBumpModel>) return m.support_radius;
            else if constexpr (std::is_same_v<T, CombModel>) {
                const long n = comb_bumps_default(m);
                return static_cast<double>(n) + 1.0 / (static_cast<double>(n) * n);
            } else {
                throw std::invalid_argument("support_radius: not a shape model");
            }
        },
        variant);
}

double comb_value(double x, long n_bumps) {
    double acc = 0.0;
    const long lo = std::max(1L, static_cast<long>(std::ceil(x - 1.0)));
    const long hi = std::min(n_bumps, static_cast<long>(std::floor(x + 1.0)));
    for (long n = lo; n <= hi; ++n) {
        const double nn = static_cast<double>(n) * static_cast<double>(n);
        const double t = nn * (x - static_cast<double>(n));
        if (std::abs(t) <= 1.0) acc += 1.0 - t * t;
    }
    return acc;
}

double comb_integral(double a, double b, long n_bumps) {
    if (b <= a) return 0.0;
    double acc = 0.0;
    const long lo = std::max(1L, static_cast<long>(std::ceil(a - 1.0)));
    const long hi = std::min(n_bumps, static_cast<long>(std::floor(b + 1.0)));
    for (long n = lo; n <= hi; ++n) {
        const double nn = static_cast<double>(n) * static_cast<double>(n);
        // antiderivative of (1 - t^2) in t = n^2 (x - n), dx = dt / n^2
        const double ta = std::clamp(nn * (a - static_cast<double>(n)), -1.0, 1.0);
        const double tb = std::clamp(nn * (b - static_cast<double>(n)), -1.0, 1.0);
        if (tb > ta)
            acc += ((tb - tb * tb * tb / 3.0) - (ta - ta * ta * ta / 3.0)) / nn;
    }
    return acc;
}

double comb_sup(long n_bumps) {
    if (n_bumps <= 1) return n_bumps == 1 ? 1.0 : 0.0;
    // Only bumps 1 and 2 overlap; the joint maximum sits near x = 33/17.
    static const double overlap_max = [] {
        double m = 1.0;
        for (double x = 1.7; x <= 2.3; x += 1e-6)
            m = std::max(m, comb_value(x, 2));
        return m + 1e-9;
    }();
    return overlap_max;
}

double bump_value(const CompactBumpModel& bump, double x) {
    const double u = std::abs(x) / bump.support_radius;
    if (u > 1.0) return 0.0;
    switch (bump.kind) {
        case BumpKind::triangular: return bump.height * (1.0 - u);
        case BumpKind::box: return bump.height;
    }
    return 0.0;
}

double bump_value2(const CompactBumpModel& bump, double x0, double x1) {
    const double u0 = std::abs(x0) / bump.support_radius;
    const double u1 = std::abs(x1) / bump.support_radius;
    if (u0 > 1.0 || u1 > 1.0) return 0.0;
    switch (bump.kind) {
        case BumpKind::triangular: return bump.height * (1.0 - u0) * (1.0 - u1);
        case BumpKind::box: return bump.height;
    }
    return 0.0;
}

namespace {

void require_1d(const Grid& grid, const char* who) {
    if (grid.dim != 1)
        throw std::invalid_argument(std::string(who) + ": one-dimensional grid required");
}

std::vector<double> grid_coords_1d(const Grid& grid) {
    std::vector<double> pts;
    pts.reserve(grid.size());
    for (long i = grid.lo[0]; i <= grid.hi[0]; ++i) pts.push_back(grid.coord(i));
    return pts;
}

SpectralPath series_Z(const Grid& grid, int K, RngStream& rng) {
    SpectralPath path;
    path.grid = grid;
    path.values.assign(grid.size(), 0.0);
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    double denom = 2.0;
    for (int k = 1; k <= K; ++k, denom *= 2.0) {
        const double n1 = rng.normal();
        const double n2 = rng.normal();
        const double omega = 2.0 * M_PI / denom;
        for (long i = grid.lo[0]; i <= grid.hi[0]; ++i) {
            const double phase = omega * grid.coord(i);
            path.values[grid.flat(i)] += n1 * (1.0 - std::cos(phase)) + n2 * std::sin(phase);
        }
    }
    for (auto& v : path.values) v *= inv_sqrt2;
    path.values[grid.flat(0)] = 0.0;  // both summand factors vanish at t = 0
    return path;
}

} // namespace

SpectralPath brown_resnick_Z(const Grid& grid, int truncation, RngStream& rng,
                             BrSampler sampler) {
    require_1d(grid, "brown_resnick_Z");
    if (truncation < 1) throw std::invalid_argument("brown_resnick_Z: truncation >= 1");
    if (sampler == BrSampler::series) return series_Z(grid, truncation, rng);

    GaussianSpec spec;
    spec.variogram = [truncation](double t) { return sigma2_series(t, truncation); };
    spec.anchor = 0.0;
    SpectralPath path;
    path.grid = grid;
    path.values = sample_gaussian_path(spec, grid_coords_1d(grid), rng);
    return path;
}

SpectralPath brown_resnick_Y(const Grid& grid, int truncation, RngStream& rng,
                             BrSampler sampler) {
    SpectralPath path = brown_resnick_Z(grid, truncation, rng, sampler);
    for (long i = grid.lo[0]; i <= grid.hi[0]; ++i) {
        const std::size_t f = grid.flat(i);
        path.values[f] = std::exp(path.values[f] -
                                  0.5 * sigma2_series(grid.coord(i), truncation));
    }
    return path;
}

SpectralPath comb_path(const Grid& grid, long n_bumps) {
    require_1d(grid, "comb_path");
    if (grid.lattice)
        throw std::invalid_argument("comb_path: continuous grid required");
    const long n = n_bumps > 0 ? n_bumps : comb_bumps_for(CombModel{0}, grid);
    SpectralPath path;
    path.grid = grid;
    path.values.reserve(grid.size());
    path.cell_mass.reserve(grid.size());
    const double h = grid.spacing;
    for (long i = grid.lo[0]; i <= grid.hi[0]; ++i) {
        const double x = grid.coord(i);
        path.values.push_back(comb_value(x, n));
        path.cell_mass.push_back(comb_integral(x - 0.5 * h, x + 0.5 * h, n));
    }
    return path;
}

SpectralPath constant_path(const Grid& grid, double level) {
    SpectralPath path;
    path.grid = grid;
    path.values.assign(grid.size(), level);
    return path;
}

SpectralPath bump_path(const Grid& grid, const CompactBumpModel& bump) {
    SpectralPath path;
    path.grid = grid;
    path.values.assign(grid.size(), 0.0);
    if (grid.dim == 1) {
        for (long i = grid.lo[0]; i <= grid.hi[0]; ++i)
            path.values[grid.flat(i)] = bump_value(bump, grid.coord(i));
    } else {
        for (long i = grid.lo[0]; i <= grid.hi[0]; ++i)
            for (long j = grid.lo[1]; j <= grid.hi[1]; ++j)
                path.values[grid.flat(i, j)] = bump_value2(bump, grid.coord(i), grid.coord(j));
    }
    if (path.is_zero())
        throw std::invalid_argument("bump_path: shape vanishes on the window");
    return path;
}

SpectralPath sample_path(const SpectralModel& model, const Grid& grid, RngStream& rng) {
    return std::visit(
        [&](const auto& m) -> SpectralPath {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, ConstantModel>) {
                return constant_path(grid, m.level);
            } else if constexpr (std::is_same_v<T, BrownResnickModel>) {
                return brown_resnick_Y(grid, m.truncation, rng, m.sampler);
            } else if constexpr (std::is_same_v<T, CompactBumpModel>) {
                return bump_path(grid, m);
            } else if constexpr (std::is_same_v<T, CombModel>) {
                return comb_path(grid, comb_bumps_for(m, grid));
            } else {
                double u = rng.uniform01();
                std::size_t pick = 0;
                double acc = 0.0;
                for (; pick + 1 < m.weights.size(); ++pick) {
                    acc += m.weights[pick];
                    if (u < acc) break;
                }
                return sample_path(m.parts[pick], grid, rng);
            }
        },
        model.variant);
}

PointSampler::PointSampler(const SpectralModel& model, std::vector<double> points,
                           bool force_cholesky)
    : points_(std::move(points)) {
    std::visit(
        [&](const auto& m) {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, ConstantModel>) {
                state_ = std::vector<double>(points_.size(), m.level);
            } else if constexpr (std::is_same_v<T, CompactBumpModel>) {
                std::vector<double> vals(points_.size());
                for (std::size_t i = 0; i < points_.size(); ++i)
                    vals[i] = bump_value(m, points_[i]);
                state_ = std::move(vals);
            } else if constexpr (std::is_same_v<T, CombModel>) {
                std::vector<double> vals(points_.size());
                for (std::size_t i = 0; i < points_.size(); ++i)
                    vals[i] = comb_value(points_[i], comb_bumps_default(m));
                state_ = std::move(vals);
            } else if constexpr (std::is_same_v<T, BrownResnickModel>) {
                BrState st;
                st.truncation = m.truncation;
                st.sampler = force_cholesky ? BrSampler::cholesky : m.sampler;
                st.sigma2.resize(points_.size());
                for (std::size_t i = 0; i < points_.size(); ++i)
                    st.sigma2[i] = sigma2_series(points_[i], m.truncation);
                if (st.sampler == BrSampler::cholesky) {
                    GaussianSpec spec;
                    spec.variogram = [K = m.truncation](double t) { return sigma2_series(t, K); };
                    st.chol = std::make_shared<GaussianPathSampler>(spec, points_);
                }
                state_ = std::move(st);
            } else {
                MixState st;
                st.cumulative.reserve(m.weights.size());
                double acc = 0.0;
                for (double w : m.weights) {
                    acc += w;
                    st.cumulative.push_back(acc);
                }
                st.parts.reserve(m.parts.size());
                for (const auto& p : m.parts)
                    st.parts.emplace_back(p, points_, force_cholesky);
                state_ = std::move(st);
            }
        },
        model.variant);
}

std::vector<double> PointSampler::sample(RngStream& rng) const {
    if (const auto* det = std::get_if<std::vector<double>>(&state_)) return *det;
    if (const auto* br = std::get_if<BrState>(&state_)) {
        std::vector<double> z;
        if (br->sampler == BrSampler::cholesky) {
            z = br->chol->sample(rng);
        } else {
            z.assign(points_.size(), 0.0);
            const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
            double denom = 2.0;
            for (int k = 1; k <= br->truncation; ++k, denom *= 2.0) {
                const double n1 = rng.normal();
                const double n2 = rng.normal();
                const double omega = 2.0 * M_PI / denom;
                for (std::size_t i = 0; i < points_.size(); ++i) {
                    const double phase = omega * points_[i];
                    z[i] += n1 * (1.0 - std::cos(phase)) + n2 * std::sin(phase);
                }
            }
            for (std::size_t i = 0; i < points_.size(); ++i) {
                z[i] *= inv_sqrt2;
                if (points_[i] == 0.0) z[i] = 0.0;
            }
        }
        for (std::size_t i = 0; i < points_.size(); ++i)
            z[i] = std::exp(z[i] - 0.5 * br->sigma2[i]);
        return z;
    }
    const auto& mix = std::get<MixState>(state_);
    const double u = rng.uniform01();
    std::size_t pick = 0;
    while (pick + 1 < mix.cumulative.size() && u >= mix.cumulative[pick]) ++pick;
    return mix.parts[pick].sample(rng);
}

} // namespace maxstab
