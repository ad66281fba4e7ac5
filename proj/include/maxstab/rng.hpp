#pragma once

#include <cstdint>
#include <functional>
#include <vector>

namespace maxstab {

/// SplitMix64 finalizer; full avalanche on 64 bits.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z += 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

/// Counter-based random stream. Output i is a pure function of
/// (seed, stream_id, i), so identical (seed, stream_id) reproduce bitwise
/// identical sequences regardless of thread count or scheduling, and
/// distinct stream_ids give statistically independent streams.
class RngStream {
public:
    explicit RngStream(std::uint64_t seed, std::uint64_t stream_id = 0) noexcept
        : seed_(seed),
          stream_id_(stream_id),
          key_lo_(mix64(seed ^ 0x8f462907590f2c68ull)),
          key_hi_(mix64(mix64(stream_id) + seed * 0xd1342543de82ef95ull)) {}

    std::uint64_t seed() const noexcept { return seed_; }
    std::uint64_t stream_id() const noexcept { return stream_id_; }

    /// Child stream keyed by up to two indices (replication, atom, ...).
    /// Derivation is positional: derive(a) != derive(0, a) in general.
    RngStream derive(std::uint64_t a, std::uint64_t b = 0) const noexcept {
        std::uint64_t id = mix64(stream_id_ + 0x9e3779b97f4a7c15ull * (2 * a + 1) +
                                 0xbf58476d1ce4e5b9ull * b);
        return RngStream(seed_, id);
    }

    std::uint64_t next_u64() noexcept {
        std::uint64_t z = counter_++;
        z = mix64(z + key_lo_);
        z = mix64(z ^ key_hi_);
        return z;
    }

    /// Uniform on the open interval (0,1); never returns 0 or 1.
    double uniform01() noexcept {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    /// Standard normal (Box-Muller, second value cached).
    double normal() noexcept;

    /// Unit-rate exponential.
    double exponential() noexcept;

private:
    std::uint64_t seed_;
    std::uint64_t stream_id_;
    std::uint64_t key_lo_;
    std::uint64_t key_hi_;
    std::uint64_t counter_ = 0;
    double cached_normal_ = 0.0;
    bool has_cached_normal_ = false;
};

/// Arrival times Gamma_i of a unit-rate Poisson process, consumed lazily so a
/// simulation can keep extending an atom sequence without re-seeding.
/// Levels U_i = 1/Gamma_i enumerate, in decreasing order, a Poisson point
/// process on (0,inf) with intensity u^-2 du.
class PoissonArrivals {
public:
    explicit PoissonArrivals(RngStream rng);
    /// Custom increment source (used by tests to inject fixed increments).
    explicit PoissonArrivals(std::function<double()> increments);

    /// Advances to the next arrival and returns U = 1/Gamma.
    double next_level();

    double gamma() const noexcept { return gamma_; }
    std::size_t count() const noexcept { return count_; }

private:
    std::function<double()> increment_;
    double gamma_ = 0.0;
    std::size_t count_ = 0;
};

/// First n levels U_1 >= ... >= U_n of the u^-2 du Poisson process.
std::vector<double> poisson_frechet_atoms(RngStream rng, std::size_t n);

/// Gaussian process pinned to zero at `anchor`, specified through the
/// incremental variance t -> sigma2(t) with sigma2(0) = 0.
struct GaussianSpec {
    std::function<double(double)> variogram;
    double anchor = 0.0;
};

/// Samples the process at `points` (1-d). The covariance
/// C(s,t) = (sigma2(s-a) + sigma2(t-a) - sigma2(t-s)) / 2 is factored with a
/// jitter ladder delta in {0, 1e-12, 1e-10, 1e-8}; failure past the ladder
/// signals a non-PSD variogram (NumericError). path(anchor) == 0 exactly.
std::vector<double> sample_gaussian_path(const GaussianSpec& spec,
                                         const std::vector<double>& points,
                                         RngStream& rng);

/// Reusable factorization for repeated draws on a fixed point set.
class GaussianPathSampler {
public:
    GaussianPathSampler(const GaussianSpec& spec, std::vector<double> points);
    std::vector<double> sample(RngStream& rng) const;
    std::size_t n_points() const noexcept { return points_.size(); }

private:
    std::vector<double> points_;
    std::vector<std::size_t> free_index_;  // positions not pinned to the anchor
    std::vector<double> chol_;             // row-major lower factor, free x free
    std::size_t n_free_ = 0;
};

// 1-Frechet distribution, P[X <= z] = exp(-c/z).
double frechet_cdf(double z, double c);
double frechet_quantile(double p, double c);

} // namespace maxstab
