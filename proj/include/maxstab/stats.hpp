#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace maxstab {

struct MeanSE {
    double mean = 0.0;
    double se = 0.0;
    std::size_t n = 0;
};

MeanSE mean_se(std::span<const double> xs);

double sample_variance(std::span<const double> xs);

/// p-quantile of a sample (nearest-rank on a sorted copy), p in [0,1].
double quantile(std::vector<double> xs, double p);

inline double median(std::vector<double> xs) { return quantile(std::move(xs), 0.5); }

struct Interval {
    double lo = 0.0;
    double hi = 1.0;
};

/// Wilson score interval for a binomial proportion (z = 1.96 by default).
Interval wilson_interval(std::size_t successes, std::size_t n, double z = 1.96);

double normal_cdf(double x);

/// One-sample Kolmogorov-Smirnov distance against a CDF.
double ks_distance(std::vector<double> samples, const std::function<double(double)>& cdf);

/// Two-sample Kolmogorov-Smirnov distance.
double ks_distance_two_sample(std::vector<double> a, std::vector<double> b);

/// Largest absolute difference between the joint ECDFs of two paired samples,
/// evaluated on a quantile grid of levels (bivariate two-sample discrepancy).
double bivariate_ecdf_distance(const std::vector<std::pair<double, double>>& a,
                               const std::vector<std::pair<double, double>>& b,
                               std::size_t n_levels = 20);

/// Pearson correlation.
double correlation(std::span<const double> xs, std::span<const double> ys);

} // namespace maxstab
