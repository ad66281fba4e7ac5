#include "maxstab/rng.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>
#include <utility>

#include "maxstab/errors.hpp"

namespace maxstab {

double RngStream::normal() noexcept {
    if (has_cached_normal_) {
        has_cached_normal_ = false;
        return cached_normal_;
    }
    const double u1 = uniform01();
    const double u2 = uniform01();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * M_PI * u2;
    cached_normal_ = radius * std::sin(angle);
    has_cached_normal_ = true;
    return radius * std::cos(angle);
}

double RngStream::exponential() noexcept { return -std::log(uniform01()); }

PoissonArrivals::PoissonArrivals(RngStream rng)
    : increment_([state = rng]() mutable { return state.exponential(); }) {}

PoissonArrivals::PoissonArrivals(std::function<double()> increments)
    : increment_(std::move(increments)) {}

double PoissonArrivals::next_level() {
    gamma_ += increment_();
    ++count_;
    return 1.0 / gamma_;
}

std::vector<double> poisson_frechet_atoms(RngStream rng, std::size_t n) {
    PoissonArrivals arrivals(rng);
    std::vector<double> levels;
    levels.reserve(n);
    for (std::size_t i = 0; i < n; ++i) levels.push_back(arrivals.next_level());
    return levels;
}

namespace {

constexpr double kAnchorTol = 1e-12;

Eigen::MatrixXd increment_covariance(const GaussianSpec& spec,
                                     const std::vector<double>& pts) {
    const auto n = static_cast<Eigen::Index>(pts.size());
    Eigen::MatrixXd cov(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double si = spec.variogram(pts[static_cast<std::size_t>(i)] - spec.anchor);
        for (Eigen::Index j = 0; j <= i; ++j) {
            const double sj = spec.variogram(pts[static_cast<std::size_t>(j)] - spec.anchor);
            const double sij = spec.variogram(pts[static_cast<std::size_t>(i)] -
                                              pts[static_cast<std::size_t>(j)]);
            cov(i, j) = 0.5 * (si + sj - sij);
            cov(j, i) = cov(i, j);
        }
    }
    return cov;
}

Eigen::MatrixXd cholesky_with_jitter(Eigen::MatrixXd cov) {
    static constexpr double kJitter[] = {0.0, 1e-12, 1e-10, 1e-8};
    for (double delta : kJitter) {
        Eigen::MatrixXd work = cov;
        if (delta > 0.0) work.diagonal().array() += delta;
        Eigen::LLT<Eigen::MatrixXd> llt(work);
        if (llt.info() == Eigen::Success) return llt.matrixL();
    }
    throw NumericError("gaussian path: covariance not positive semidefinite "
                       "after jitter ladder; variogram is not valid");
}

} // namespace

GaussianPathSampler::GaussianPathSampler(const GaussianSpec& spec,
                                         std::vector<double> points)
    : points_(std::move(points)) {
    std::vector<double> free_points;
    for (std::size_t i = 0; i < points_.size(); ++i) {
        if (std::abs(points_[i] - spec.anchor) > kAnchorTol) {
            free_index_.push_back(i);
            free_points.push_back(points_[i]);
        }
    }
    n_free_ = free_points.size();
    if (n_free_ == 0) return;
    Eigen::MatrixXd lower = cholesky_with_jitter(increment_covariance(spec, free_points));
    chol_.assign(n_free_ * n_free_, 0.0);
    for (std::size_t i = 0; i < n_free_; ++i)
        for (std::size_t j = 0; j <= i; ++j)
            chol_[i * n_free_ + j] = lower(static_cast<Eigen::Index>(i),
                                           static_cast<Eigen::Index>(j));
}

std::vector<double> GaussianPathSampler::sample(RngStream& rng) const {
    std::vector<double> path(points_.size(), 0.0);
    if (n_free_ == 0) return path;
    std::vector<double> noise(n_free_);
    for (auto& x : noise) x = rng.normal();
    for (std::size_t i = 0; i < n_free_; ++i) {
        double acc = 0.0;
        for (std::size_t j = 0; j <= i; ++j) acc += chol_[i * n_free_ + j] * noise[j];
        path[free_index_[i]] = acc;
    }
    return path;
}

std::vector<double> sample_gaussian_path(const GaussianSpec& spec,
                                         const std::vector<double>& points,
                                         RngStream& rng) {
    GaussianPathSampler sampler(spec, points);
    return sampler.sample(rng);
}

double frechet_cdf(double z, double c) {
    if (!(z > 0.0)) throw std::domain_error("frechet_cdf: z must be > 0");
    if (!(c > 0.0)) throw std::domain_error("frechet_cdf: scale must be > 0");
    return std::exp(-c / z);
}

double frechet_quantile(double p, double c) {
    if (!(p > 0.0 && p < 1.0)) throw std::domain_error("frechet_quantile: p must be in (0,1)");
    if (!(c > 0.0)) throw std::domain_error("frechet_quantile: scale must be > 0");
    return -c / std::log(p);
}

} // namespace maxstab
