#include "maxstab/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace maxstab {

MeanSE mean_se(std::span<const double> xs) {
    MeanSE out;
    out.n = xs.size();
    if (out.n == 0) return out;
    double acc = 0.0;
    for (double x : xs) acc += x;
    out.mean = acc / static_cast<double>(out.n);
    if (out.n > 1) {
        double ss = 0.0;
        for (double x : xs) ss += (x - out.mean) * (x - out.mean);
        out.se = std::sqrt(ss / (static_cast<double>(out.n - 1) * static_cast<double>(out.n)));
    }
    return out;
}

double sample_variance(std::span<const double> xs) {
    if (xs.size() < 2) return 0.0;
    double mean = 0.0;
    for (double x : xs) mean += x;
    mean /= static_cast<double>(xs.size());
    double ss = 0.0;
    for (double x : xs) ss += (x - mean) * (x - mean);
    return ss / static_cast<double>(xs.size() - 1);
}

double quantile(std::vector<double> xs, double p) {
    if (xs.empty()) throw std::invalid_argument("quantile: empty sample");
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("quantile: p in [0,1]");
    std::sort(xs.begin(), xs.end());
    const auto idx = static_cast<std::size_t>(p * static_cast<double>(xs.size() - 1) + 0.5);
    return xs[std::min(idx, xs.size() - 1)];
}

Interval wilson_interval(std::size_t successes, std::size_t n, double z) {
    if (n == 0) return {0.0, 1.0};
    const double nn = static_cast<double>(n);
    const double p = static_cast<double>(successes) / nn;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / nn;
    const double center = (p + z2 / (2.0 * nn)) / denom;
    const double half = z * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn)) / denom;
    return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double ks_distance(std::vector<double> samples, const std::function<double(double)>& cdf) {
    if (samples.empty()) throw std::invalid_argument("ks_distance: empty sample");
    std::sort(samples.begin(), samples.end());
    const double n = static_cast<double>(samples.size());
    double d = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const double f = cdf(samples[i]);
        d = std::max(d, std::abs(static_cast<double>(i + 1) / n - f));
        d = std::max(d, std::abs(f - static_cast<double>(i) / n));
    }
    return d;
}

double ks_distance_two_sample(std::vector<double> a, std::vector<double> b) {
    if (a.empty() || b.empty())
        throw std::invalid_argument("ks_distance_two_sample: empty sample");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    double d = 0.0;
    std::size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        if (a[i] <= b[j]) ++i;
        else ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    return d;
}

double bivariate_ecdf_distance(const std::vector<std::pair<double, double>>& a,
                               const std::vector<std::pair<double, double>>& b,
                               std::size_t n_levels) {
    if (a.empty() || b.empty())
        throw std::invalid_argument("bivariate_ecdf_distance: empty sample");
    // quantile grid from the pooled margins
    std::vector<double> xs, ys;
    xs.reserve(a.size() + b.size());
    ys.reserve(a.size() + b.size());
    for (const auto& [x, y] : a) { xs.push_back(x); ys.push_back(y); }
    for (const auto& [x, y] : b) { xs.push_back(x); ys.push_back(y); }
    std::sort(xs.begin(), xs.end());
    std::sort(ys.begin(), ys.end());

    std::vector<double> lx, ly;
    for (std::size_t k = 1; k <= n_levels; ++k) {
        const double q = static_cast<double>(k) / static_cast<double>(n_levels + 1);
        lx.push_back(xs[static_cast<std::size_t>(q * static_cast<double>(xs.size() - 1))]);
        ly.push_back(ys[static_cast<std::size_t>(q * static_cast<double>(ys.size() - 1))]);
    }

    auto joint_ecdf = [](const std::vector<std::pair<double, double>>& s, double x, double y) {
        std::size_t cnt = 0;
        for (const auto& [u, v] : s) cnt += (u <= x && v <= y);
        return static_cast<double>(cnt) / static_cast<double>(s.size());
    };

    double d = 0.0;
    for (double x : lx)
        for (double y : ly)
            d = std::max(d, std::abs(joint_ecdf(a, x, y) - joint_ecdf(b, x, y)));
    return d;
}

double correlation(std::span<const double> xs, std::span<const double> ys) {
    if (xs.size() != ys.size() || xs.size() < 2)
        throw std::invalid_argument("correlation: matched samples of size >= 2 required");
    const double n = static_cast<double>(xs.size());
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) { mx += xs[i]; my += ys[i]; }
    mx /= n;
    my /= n;
    double sxy = 0, sxx = 0, syy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxy += (xs[i] - mx) * (ys[i] - my);
        sxx += (xs[i] - mx) * (xs[i] - mx);
        syy += (ys[i] - my) * (ys[i] - my);
    }
    if (sxx == 0.0 || syy == 0.0) return 0.0;
    return sxy / std::sqrt(sxx * syy);
}

} // namespace maxstab
