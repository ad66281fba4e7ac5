#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "maxstab/catalog.hpp"
#include "maxstab/diagnostics.hpp"
#include "maxstab/errors.hpp"

using namespace maxstab;

TEST_CASE("min-expectation curve: exact values for deterministic shapes") {
    const auto bump = SpectralModel::compact_bump();
    const auto curve = est_min_expectation(bump, {0.0, 0.5, 3.0}, 200, RngStream(1));
    REQUIRE(curve.size() == 3);
    CHECK(curve[0].mean == 1.0);  // min with itself
    CHECK(curve[0].se == 0.0);
    CHECK(curve[1].mean == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(curve[2].mean == 0.0);  // disjoint supports
}

TEST_CASE("min-expectation for brown-resnick: pinned origin and the dyadic plateau") {
    const auto br = SpectralModel::brown_resnick(40);
    const std::size_t n = 20000;
    const auto curve =
        est_min_expectation(br, {0.0, 1.0, 4.0, 16.0, 64.0, 97.0}, n, RngStream(7));
    CHECK(curve[0].mean == 1.0);
    CHECK(curve[0].se == 0.0);

    // closed-form oracle: E[Y(t) ^ Y(0)] = 2 (1 - Phi(sigma(t)/2)) with Y(0) = 1
    const double s1 = std::sqrt(sigma2_series(1.0, 40));
    const double oracle = 2.0 * (1.0 - normal_cdf(s1 / 2.0));
    for (std::size_t k = 1; k <= 4; ++k) {
        CHECK(std::abs(curve[k].mean - oracle) < std::max(3.0 * curve[k].se, 0.012));
    }
    // dyadic bands overlap each other
    for (std::size_t k = 2; k <= 4; ++k)
        CHECK(std::abs(curve[k].mean - curve[1].mean) <
              3.0 * (curve[k].se + curve[1].se));
    // generic lags fall below the dyadic plateau
    CHECK(curve[5].mean < curve[1].mean - 0.05);
}

TEST_CASE("bivariate identity: the two routes agree") {
    SUBCASE("brown-resnick at lag 0 collapses to the marginal") {
        const auto est =
            est_bivariate_identity(SpectralModel::brown_resnick(40), 0.0, 5000, RngStream(3));
        CHECK(est.lhs == 1.0);
        CHECK(est.lhs_se == 0.0);
        CHECK(std::abs(est.gap) < 3.0 * est.pooled_se);
        CHECK_FALSE(est.exact_fields);
    }

    SUBCASE("brown-resnick at lag 1") {
        const auto est =
            est_bivariate_identity(SpectralModel::brown_resnick(40), 1.0, 20000, RngStream(4));
        CHECK(std::abs(est.gap) < 3.0 * est.pooled_se);
    }

    SUBCASE("bump at a disjoint-support lag: independence") {
        const auto est =
            est_bivariate_identity(SpectralModel::compact_bump(), 3.0, 5000, RngStream(5));
        CHECK(est.lhs == 0.0);
        CHECK(est.lhs_se == 0.0);
        CHECK(est.exact_fields);
        // rhs estimates 2 + log e^{-2} = 0
        CHECK(std::abs(est.gap) < 3.0 * est.pooled_se);
    }

    SUBCASE("bump at an overlapping lag: translation-mixed spectral route") {
        const auto est =
            est_bivariate_identity(SpectralModel::compact_bump(), 0.5, 20000, RngStream(6));
        // quadrature of min over the overlap of two unit tents at offset 1/2
        CHECK(est.lhs == doctest::Approx(0.5625).epsilon(1e-12));
        CHECK(std::abs(est.gap) < 3.0 * est.pooled_se);
    }

    SUBCASE("un-normalized models are rejected with a rescaling hint") {
        CHECK_THROWS_WITH_AS(
            (void)est_bivariate_identity(SpectralModel::constant(2.0), 1.0, 200, RngStream(1)),
            doctest::Contains("rescale"), std::invalid_argument);
        CHECK_THROWS_AS(
            (void)est_bivariate_identity(
                SpectralModel::compact_bump(BumpKind::triangular, 1.0, 2.0), 1.0, 200,
                RngStream(1)),
            std::invalid_argument);
        const auto mix = SpectralModel::mixture(
            {0.5, 0.5}, {SpectralModel::constant(1.0), SpectralModel::compact_bump()});
        CHECK_THROWS_AS((void)est_bivariate_identity(mix, 1.0, 200, RngStream(1)),
                        std::invalid_argument);
    }
}

TEST_CASE("cesaro criterion curves") {
    SUBCASE("constant: flat at the level") {
        const Grid grid = Grid::lattice1d(64);
        const auto curve = est_cesaro_criterion(SpectralModel::constant(1.0), grid,
                                                {8.0, 16.0, 32.0, 64.0}, 50, RngStream(2));
        for (double c : curve.mean_curve) CHECK(c == doctest::Approx(1.0).epsilon(1e-12));
        for (double m : curve.median_A) CHECK(m == doctest::Approx(1.0).epsilon(1e-12));
    }

    SUBCASE("bump: decays with the window volume") {
        const Grid grid = Grid::lattice1d(64);
        const auto curve = est_cesaro_criterion(SpectralModel::compact_bump(), grid,
                                                {8.0, 16.0, 32.0, 64.0}, 50, RngStream(2));
        for (std::size_t k = 1; k < curve.mean_curve.size(); ++k)
            CHECK(curve.mean_curve[k] < curve.mean_curve[k - 1] / 1.9);
    }

    SUBCASE("brown-resnick: medians fall across the dyadic ladder") {
        const Grid grid = Grid::continuous1d(256.0, 0.125);
        const auto curve = est_cesaro_criterion(SpectralModel::brown_resnick(40), grid,
                                                {16.0, 64.0, 256.0}, 100, RngStream(9));
        CHECK(curve.median_A[1] < 0.9 * curve.median_A[0]);
        CHECK(curve.median_A[2] < 0.9 * curve.median_A[1]);
    }
}

TEST_CASE("theta estimates") {
    SUBCASE("constant: theta = 1 at every z, z-invariant within 5%") {
        SimConfig sim;
        sim.mode = Truncation::Mode::threshold;
        const PointFieldSimulator fields(SpectralModel::constant(1.0), {0.0}, sim);
        const std::size_t n = 20000;
        std::vector<double> sups(n);
        RngStream root(11);
        for (std::size_t i = 0; i < n; ++i) sups[i] = fields.simulate(root.derive(i))[0];
        const auto thetas = est_theta(sups, {0.5, 1.0, 2.0});
        double lo = 1e300, hi = 0.0, mean = 0.0;
        for (const auto& t : thetas) {
            REQUIRE(t.usable);
            CHECK(std::abs(t.theta - 1.0) < 0.05);
            lo = std::min(lo, t.theta);
            hi = std::max(hi, t.theta);
            mean += t.theta / 3.0;
        }
        CHECK((hi - lo) < 0.05 * mean);
    }

    SUBCASE("triangular moving maximum matches the quadrature oracle") {
        const double h = 0.125;
        std::vector<double> pts;
        for (double x = 0.0; x <= 1.0 + 1e-9; x += h) pts.push_back(x);
        const Grid quad = Grid::continuous1d(2.0, h);
        const ShapeLaw law = shape_law_from_model(SpectralModel::compact_bump(), quad);
        SimConfig sim;
        sim.mode = Truncation::Mode::threshold;
        const PointFieldSimulator fields(law, pts, 2.0, h, false, sim);

        // oracle: quadrature of sup_{x in K} shape(x - y) over the position grid
        double theta_oracle = 0.0;
        for (long j = -16; j <= 24; ++j) {
            double g = 0.0;
            for (double x : pts)
                g = std::max(g, bump_value(CompactBumpModel{}, x - j * h));
            theta_oracle += g * h;
        }
        CHECK(theta_oracle == doctest::Approx(2.0).epsilon(1e-12));

        const std::size_t n = 20000;
        std::vector<double> sups(n);
        RngStream root(13);
        for (std::size_t i = 0; i < n; ++i) {
            const auto eta = fields.simulate(root.derive(i));
            sups[i] = *std::max_element(eta.begin(), eta.end());
        }
        for (const auto& t : est_theta(sups, {0.5, 1.0, 2.0})) {
            REQUIRE(t.usable);
            CHECK(std::abs(t.theta - theta_oracle) < 0.05 * theta_oracle);
        }
    }

    SUBCASE("an unreachable z is flagged unusable") {
        std::vector<double> sups(100, 5.0);
        const auto thetas = est_theta(sups, {0.01});
        REQUIRE(thetas.size() == 1);
        CHECK_FALSE(thetas[0].usable);
    }
}

TEST_CASE("max-stability folding") {
    SimConfig sim;
    sim.mode = Truncation::Mode::threshold;
    const PointFieldSimulator fields(SpectralModel::constant(1.0), {0.0}, sim);
    for (unsigned folds : {1u, 10u}) {
        const auto res = max_stability_test(fields, folds, 10000, RngStream(17 + folds));
        REQUIRE(res.size() == 1);
        CHECK(res[0].ks < 0.02);
    }
}

TEST_CASE("tail probabilities") {
    const std::vector<double> deltas = {0.05, 0.1, 0.2};
    SUBCASE("bump vanishes beyond its support") {
        const auto cells =
            est_tail_probabilities(SpectralModel::compact_bump(), {2.0, 3.0}, deltas, 200,
                                   RngStream(1));
        for (const auto& c : cells) CHECK(c.p == 0.0);
    }
    SUBCASE("constant persists") {
        const auto cells = est_tail_probabilities(SpectralModel::constant(1.0), {4.0, 64.0},
                                                  deltas, 200, RngStream(1));
        for (const auto& c : cells) CHECK(c.p == 1.0);
    }
    SUBCASE("brown-resnick sits at the lognormal oracle on dyadic lags") {
        const double s2 = sigma2_series(1.0, 40);
        const double oracle = 1.0 - normal_cdf((std::log(0.1) + 0.5 * s2) / std::sqrt(s2));
        const auto cells = est_tail_probabilities(SpectralModel::brown_resnick(40),
                                                  {1.0, 4.0, 16.0}, {0.1}, 10000, RngStream(2));
        for (const auto& c : cells) CHECK(std::abs(c.p - oracle) < 0.03);
    }
}

namespace {

VerdictInputs bump_like_inputs() {
    VerdictInputs in;
    in.n_paths = 100;
    in.hopf_integral_dissipative = 100;
    in.decay_dissipative = 100;
    in.neveu_null = 100;
    in.cesaro_median = {0.5, 0.05, 0.005};
    for (double lag : {8.0, 16.0, 32.0, 64.0})
        in.tail.push_back({lag, 0.1, 0.0, {0.0, 0.01}});
    in.unit_sup_samples.assign(50, 2.0);
    in.origin_samples.assign(50, 1.0);
    return in;
}

VerdictInputs constant_like_inputs() {
    VerdictInputs in;
    in.n_paths = 100;
    in.hopf_integral_conservative = 100;
    in.decay_conservative = 100;
    in.neveu_positive = 100;
    in.cesaro_median = {1.0, 1.0, 1.0};
    for (double lag : {8.0, 16.0, 32.0, 64.0})
        in.tail.push_back({lag, 0.1, 1.0, {0.99, 1.0}});
    in.unit_sup_samples.assign(50, 1.0);
    in.origin_samples.assign(50, 1.0);
    return in;
}

VerdictInputs comb_like_inputs() {
    VerdictInputs in;
    in.n_paths = 1;
    in.hopf_integral_dissipative = 1;
    in.decay_conservative = 1;
    in.neveu_null = 1;
    in.cesaro_median = {0.1, 0.01, 0.001};
    in.tail.push_back({64.0, 0.1, 0.0, {0.0, 0.01}});
    in.unit_sup_samples.assign(50, 40.0);
    in.origin_samples.assign(50, 1.0);
    return in;
}

VerdictInputs br_like_inputs() {
    VerdictInputs in;
    in.n_paths = 100;
    in.hopf_integral_conservative = 20;
    in.decay_conservative = 90;
    in.neveu_null = 97;
    in.cesaro_median = {0.3, 0.2, 0.1};
    for (double lag : {64.0, 128.0, 256.0})
        in.tail.push_back({lag, 0.1, 0.63, {0.6, 0.66}});
    in.unit_sup_samples.assign(50, 1.6);
    in.origin_samples.assign(50, 1.0);
    return in;
}

} // namespace

TEST_CASE("verdict logic on the four catalog signatures") {
    const Verdicts bump = make_verdicts(bump_like_inputs());
    CHECK(bump.ergodic == TriState::supported);
    CHECK(bump.mixing == TriState::supported);
    CHECK(bump.m3 == TriState::supported);
    CHECK_FALSE(bump.conflict);

    const Verdicts flat = make_verdicts(constant_like_inputs());
    CHECK(flat.ergodic == TriState::rejected);
    CHECK(flat.mixing == TriState::rejected);
    CHECK(flat.m3 == TriState::rejected);

    const Verdicts comb = make_verdicts(comb_like_inputs());
    CHECK(comb.conflict);
    CHECK(comb.ergodic == TriState::inconclusive);
    CHECK(comb.mixing == TriState::inconclusive);
    CHECK(comb.m3 == TriState::inconclusive);

    const Verdicts br = make_verdicts(br_like_inputs());
    CHECK(br.ergodic == TriState::supported);
    CHECK(br.mixing == TriState::rejected);
    CHECK(br.m3 == TriState::rejected);

    // criterion hierarchy: moving-maximum implies mixing implies ergodic
    for (const Verdicts& v : {bump, flat, comb, br}) {
        if (v.m3 == TriState::supported) CHECK(v.mixing == TriState::supported);
        if (v.mixing == TriState::supported) CHECK(v.ergodic == TriState::supported);
    }
}

TEST_CASE("estimator merges are independent of the thread count") {
    const auto br = SpectralModel::brown_resnick(20);
    const auto one = est_min_expectation(br, {1.0, 4.0}, 2000, RngStream(21), 1);
    const auto four = est_min_expectation(br, {1.0, 4.0}, 2000, RngStream(21), 4);
    for (std::size_t k = 0; k < one.size(); ++k) {
        CHECK(one[k].mean == four[k].mean);  // bitwise: fixed substreams + ordered reduce
        CHECK(one[k].se == four[k].se);
    }
}
