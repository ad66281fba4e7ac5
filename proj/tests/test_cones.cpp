#include <doctest.h>

#include <cmath>
#include <vector>

#include "maxstab/catalog.hpp"
#include "maxstab/cones.hpp"

using namespace maxstab;

namespace {

std::vector<double> dyadic_radii(double lo, double hi) {
    std::vector<double> out;
    for (double r = lo; r <= hi + 1e-9; r *= 2.0) out.push_back(r);
    return out;
}

SpectralPath geometric_lattice_path(long radius) {
    SpectralPath p;
    p.grid = Grid::lattice1d(radius);
    p.values.resize(p.grid.size());
    for (long i = -radius; i <= radius; ++i)
        p.values[p.grid.flat(i)] = std::pow(2.0, -static_cast<double>(std::labs(i)));
    return p;
}

} // namespace

TEST_CASE("constant path: conservative, conservative, positive") {
    const SpectralPath path = constant_path(Grid::lattice1d(64), 1.0);
    const auto radii = dyadic_radii(8, 64);

    const ConeVerdict integral = integral_test(path, radii);
    CHECK(integral.label == ConeLabel::conservative);
    for (const auto& row : integral.trace)
        CHECK(row.cesaro == doctest::Approx(1.0).epsilon(1e-12));

    CHECK(decay_test(path, radii).label == ConeLabel::conservative);
    CHECK(cesaro_test(path, radii).label == ConeLabel::positive);
}

TEST_CASE("triangular bump: dissipative on both hopf readings, null on neveu") {
    const SpectralPath path =
        bump_path(Grid::continuous1d(64.0, 0.125), CompactBumpModel{});
    const auto radii = dyadic_radii(8, 64);

    const ConeVerdict integral = integral_test(path, radii);
    CHECK(integral.label == ConeLabel::dissipative);
    // I_r is exactly constant past the support
    for (const auto& row : integral.trace)
        CHECK(row.integral == doctest::Approx(1.0).epsilon(1e-12));

    CHECK(decay_test(path, radii).label == ConeLabel::dissipative);
    CHECK(cesaro_test(path, radii).label == ConeLabel::null_recurrent);

    const ConeVerdict sl = sup_local_test(path, 0.5, dyadic_radii(4, 32));
    CHECK(sl.label == ConeLabel::dissipative);
}

TEST_CASE("comb: the dual-label signature") {
    const Grid grid = Grid::continuous1d(300.0, 0.125);
    const SpectralPath path = comb_path(grid, 301);
    const auto radii = dyadic_radii(8, 256);

    const ConeVerdict integral = integral_test(path, radii);
    CHECK(integral.label == ConeLabel::dissipative);
    // I_r tracks the closed-form partial sums (4/3) sum n^-2
    for (std::size_t k = 0; k < radii.size(); ++k) {
        double partial = 0.0;
        for (long n = 1; n <= static_cast<long>(radii[k]); ++n)
            partial += 1.0 / (static_cast<double>(n) * n);
        CHECK(integral.trace[k].integral ==
              doctest::Approx((4.0 / 3.0) * partial).epsilon(2e-3));
    }

    const ConeVerdict decay = decay_test(path, radii);
    CHECK(decay.label == ConeLabel::conservative);
    for (const auto& row : decay.trace) CHECK(row.annulus_sup >= 1.0);

    CHECK(cesaro_test(path, radii).label == ConeLabel::null_recurrent);

    // sup-smoothing spreads each peak over a unit plateau: integral diverges
    const ConeVerdict sl = sup_local_test(path, 0.5, dyadic_radii(8, 256));
    CHECK(sl.label == ConeLabel::conservative);

    PathClassification cls = classify_path(path);
    CHECK(cls.conflict());
    CHECK(cls.hopf_label() == ConeLabel::dissipative);
    CHECK(cls.neveu_label() == ConeLabel::null_recurrent);
}

TEST_CASE("brown-resnick paths read null on the neveu axis") {
    const Grid grid = Grid::continuous1d(256.0, 0.125);
    RngStream root(4242);
    std::size_t null_count = 0, total = 30;
    for (std::size_t i = 0; i < total; ++i) {
        RngStream rep = root.derive(i);
        const SpectralPath y = brown_resnick_Y(grid, 40, rep, BrSampler::series);
        const ConeVerdict v = cesaro_test(y, dyadic_radii(8, 256));
        null_count += v.label == ConeLabel::null_recurrent;
    }
    CHECK(null_count >= 24);  // window 256 is modest; the acceptance run uses 1024
}

TEST_CASE("labels are scale-equivariant with traces scaled") {
    const auto radii = dyadic_radii(8, 64);
    std::vector<SpectralPath> paths;
    paths.push_back(constant_path(Grid::lattice1d(64), 1.0));
    paths.push_back(bump_path(Grid::continuous1d(64.0, 0.125), CompactBumpModel{}));
    paths.push_back(comb_path(Grid::continuous1d(64.0, 0.125), 65));

    for (const auto& base : paths) {
        const PathClassification ref = classify_path(base, {{}, radii, false});
        for (double u : {0.01, 1000.0}) {
            SpectralPath scaled = base;
            for (auto& v : scaled.values) v *= u;
            for (auto& m : scaled.cell_mass) m *= u;
            const PathClassification got = classify_path(scaled, {{}, radii, false});
            CHECK(got.hopf_label() == ref.hopf_label());
            CHECK(got.hopf_decay.label == ref.hopf_decay.label);
            CHECK(got.neveu_label() == ref.neveu_label());
            for (std::size_t k = 0; k < radii.size(); ++k)
                CHECK(got.hopf_integral.trace[k].integral ==
                      doctest::Approx(u * ref.hopf_integral.trace[k].integral)
                          .epsilon(1e-12));
        }
    }
}

TEST_CASE("labels are invariant under window shifts") {
    const auto radii = dyadic_radii(4, 32);
    const Grid grid = Grid::continuous1d(64.0, 0.125);

    // bump re-centered at +3, classified on the same symmetric window
    SpectralPath shifted_bump;
    shifted_bump.grid = grid;
    shifted_bump.values.resize(grid.size());
    for (long i = grid.lo[0]; i <= grid.hi[0]; ++i)
        shifted_bump.values[grid.flat(i)] =
            bump_value(CompactBumpModel{}, grid.coord(i) - 3.0);
    CHECK(integral_test(shifted_bump, radii).label == ConeLabel::dissipative);
    CHECK(decay_test(shifted_bump, radii).label == ConeLabel::dissipative);
    CHECK(cesaro_test(shifted_bump, radii).label == ConeLabel::null_recurrent);

    // comb shifted by one lattice step keeps its dual signature (the integral
    // stabilizes beyond r ~ 50, so the ladder must reach past that)
    const Grid wide = Grid::continuous1d(300.0, 0.125);
    SpectralPath shifted_comb;
    shifted_comb.grid = wide;
    shifted_comb.values.resize(wide.size());
    shifted_comb.cell_mass.resize(wide.size());
    for (long i = wide.lo[0]; i <= wide.hi[0]; ++i) {
        const double x = wide.coord(i) - 1.0;
        shifted_comb.values[wide.flat(i)] = comb_value(x, 301);
        shifted_comb.cell_mass[wide.flat(i)] =
            comb_integral(x - 0.0625, x + 0.0625, 301);
    }
    const auto wide_radii = dyadic_radii(8, 256);
    CHECK(integral_test(shifted_comb, wide_radii).label == ConeLabel::dissipative);
    CHECK(decay_test(shifted_comb, wide_radii).label == ConeLabel::conservative);
}

TEST_CASE("evidence is monotone: I_r never decreases") {
    const Grid grid = Grid::continuous1d(64.0, 0.125);
    RngStream root(8);
    for (int i = 0; i < 20; ++i) {
        RngStream rep = root.derive(i);
        const SpectralPath y = brown_resnick_Y(grid, 40, rep, BrSampler::series);
        const ConeVerdict v = integral_test(y, dyadic_radii(8, 64));
        for (std::size_t k = 1; k < v.trace.size(); ++k)
            CHECK(v.trace[k].integral >= v.trace[k - 1].integral);
    }
}

TEST_CASE("lattice inclusion: integral-dissipative implies decay-dissipative") {
    const auto radii = dyadic_radii(8, 64);
    std::vector<SpectralPath> paths;
    paths.push_back(constant_path(Grid::lattice1d(64), 1.0));
    paths.push_back(bump_path(Grid::lattice1d(64), CompactBumpModel{BumpKind::box, 2.0, 1.0}));
    paths.push_back(geometric_lattice_path(64));
    RngStream root(55);
    for (int i = 0; i < 10; ++i) {
        RngStream rep = root.derive(i);
        paths.push_back(brown_resnick_Y(Grid::lattice1d(64), 40, rep, BrSampler::series));
    }
    for (const auto& p : paths) {
        const ConeLabel hopf = integral_test(p, radii).label;
        if (hopf == ConeLabel::dissipative)
            CHECK(decay_test(p, radii).label == ConeLabel::dissipative);
    }
    // the geometric path is a genuine instance of the implication
    CHECK(integral_test(geometric_lattice_path(64), radii).label == ConeLabel::dissipative);
}

TEST_CASE("weighted evidence is advisory and converges for bounded paths") {
    const auto radii = dyadic_radii(8, 64);
    const WeightFunction w = WeightFunction::exponential();

    // a positive constant path still shows a convergent weighted integral:
    // exactly the documented discrepancy, which is why the label never
    // overrides the cesaro test
    const SpectralPath flat = constant_path(Grid::lattice1d(64), 1.0);
    const ConeVerdict wv = weighted_test(flat, w, radii);
    CHECK(wv.label == ConeLabel::null_recurrent);
    CHECK(cesaro_test(flat, radii).label == ConeLabel::positive);

    const SpectralPath bump =
        bump_path(Grid::continuous1d(64.0, 0.125), CompactBumpModel{});
    CHECK(weighted_test(bump, w, radii).label == ConeLabel::null_recurrent);

    const SpectralPath comb = comb_path(Grid::continuous1d(64.0, 0.125), 65);
    CHECK(weighted_test(comb, w, radii).label == ConeLabel::null_recurrent);

    SpectralPath plane = constant_path(Grid::lattice2d(16), 1.0);
    CHECK_THROWS_AS((void)weighted_test(plane, w, dyadic_radii(2, 16)),
                    std::invalid_argument);
}

TEST_CASE("input validation") {
    const SpectralPath flat = constant_path(Grid::lattice1d(64), 1.0);
    SpectralPath zero = flat;
    for (auto& v : zero.values) v = 0.0;
    CHECK_THROWS_AS((void)integral_test(zero, dyadic_radii(8, 64)), std::invalid_argument);
    CHECK_THROWS_AS((void)integral_test(flat, {8.0, 16.0, 32.0}), std::invalid_argument);
    CHECK_THROWS_AS((void)integral_test(flat, dyadic_radii(16, 128)), std::invalid_argument);
    CHECK_THROWS_AS((void)decay_test(zero, dyadic_radii(8, 64)), std::invalid_argument);

    CHECK_THROWS_AS((void)sup_local_test(flat, 0.5, dyadic_radii(8, 32)),
                    std::invalid_argument);  // lattice path
    const SpectralPath coarse = bump_path(Grid::continuous1d(64.0, 0.25), CompactBumpModel{});
    CHECK_THROWS_AS((void)sup_local_test(coarse, 0.5, dyadic_radii(8, 32)),
                    std::invalid_argument);  // spacing > halfwidth/4
}

TEST_CASE("classification is deterministic") {
    const SpectralPath comb = comb_path(Grid::continuous1d(64.0, 0.125), 65);
    const PathClassification a = classify_path(comb);
    const PathClassification b = classify_path(comb);
    CHECK(a.hopf_label() == b.hopf_label());
    CHECK(a.neveu_label() == b.neveu_label());
    REQUIRE(a.hopf_integral.trace.size() == b.hopf_integral.trace.size());
    for (std::size_t k = 0; k < a.hopf_integral.trace.size(); ++k)
        CHECK(a.hopf_integral.trace[k].integral == b.hopf_integral.trace[k].integral);
}
