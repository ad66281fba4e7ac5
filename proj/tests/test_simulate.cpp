#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "maxstab/errors.hpp"
#include "maxstab/simulate.hpp"
#include "maxstab/stats.hpp"

using namespace maxstab;

namespace {

SimConfig threshold_cfg() {
    SimConfig cfg;
    cfg.mode = Truncation::Mode::threshold;
    return cfg;
}

SimConfig fixed_cfg(std::size_t n) {
    SimConfig cfg;
    cfg.mode = Truncation::Mode::fixed_n;
    cfg.n_atoms = n;
    return cfg;
}

} // namespace

TEST_CASE("constant model collapses to the largest level") {
    const Grid grid = Grid::lattice1d(8);
    const auto model = SpectralModel::constant(1.0);
    const MaxStableField field = simulate_dehaan(model, grid, RngStream(5), threshold_cfg());
    CHECK(field.truncation.exact);
    CHECK(field.truncation.n_used == 1);  // the second level can never win
    for (double v : field.values) CHECK(v == field.values[0]);
    CHECK(field.atoms.size() == 1);
    CHECK(field.values[0] == field.atoms[0].u);
}

TEST_CASE("constant marginal has the unit Frechet law") {
    const Grid grid = Grid::lattice1d(2);
    const auto model = SpectralModel::constant(1.0);
    const std::size_t n = 20000;
    std::vector<double> origin(n);
    RngStream root(99);
    for (std::size_t i = 0; i < n; ++i) {
        const MaxStableField f = simulate_dehaan(model, grid, root.derive(i), threshold_cfg());
        origin[i] = f.values[grid.flat(0)];
    }
    const double d = ks_distance(origin, [](double z) { return std::exp(-1.0 / z); });
    CHECK(d < 0.015);
}

TEST_CASE("fixed_n with one atom is the single scaled path") {
    const Grid grid = Grid::lattice1d(4);
    const auto model = SpectralModel::brown_resnick(20);
    const MaxStableField field = simulate_dehaan(model, grid, RngStream(7), fixed_cfg(1));
    CHECK_FALSE(field.truncation.exact);
    REQUIRE(field.atoms.size() == 1);
    for (long i = grid.lo[0]; i <= grid.hi[0]; ++i)
        CHECK(field.values[grid.flat(i)] ==
              field.atoms[0].u * field.atoms[0].path.values[grid.flat(i)]);
}

TEST_CASE("compact bump threshold marginal matches Frechet with scale E[Y(0)]") {
    const Grid grid = Grid::continuous1d(2.0, 0.5);
    const auto model = SpectralModel::compact_bump();
    const std::size_t n = 20000;
    std::vector<double> origin(n);
    RngStream root(123);
    for (std::size_t i = 0; i < n; ++i) {
        const MaxStableField f = simulate_dehaan(model, grid, root.derive(i), threshold_cfg());
        REQUIRE(f.truncation.exact);
        origin[i] = f.values[grid.flat(0)];
    }
    // c(0) = shape(0) = 1
    const double d = ks_distance(origin, [](double z) { return std::exp(-1.0 / z); });
    CHECK(d < 0.015);
}

TEST_CASE("threshold stopping is exact: extra atoms change nothing") {
    // atom substreams are keyed by atom index, so a longer fixed_n run with
    // the same seed extends the threshold run atom-for-atom
    const Grid grid = Grid::continuous1d(2.0, 0.5);
    for (int seed = 1; seed <= 20; ++seed) {
        const auto model = SpectralModel::compact_bump();
        const MaxStableField exact =
            simulate_dehaan(model, grid, RngStream(seed), threshold_cfg());
        const MaxStableField longer = simulate_dehaan(
            model, grid, RngStream(seed), fixed_cfg(exact.truncation.n_used + 100));
        for (std::size_t f = 0; f < exact.values.size(); ++f)
            CHECK(exact.values[f] == longer.values[f]);
    }
}

TEST_CASE("m3 threshold stopping is exact on the inner window") {
    const Grid grid = Grid::lattice1d(4);
    const auto bump = SpectralModel::compact_bump();
    const ShapeLaw law = shape_law_from_model(bump, grid);
    M3Config cfg;
    cfg.padding = 1.0;
    cfg.sim = threshold_cfg();
    for (int seed = 1; seed <= 20; ++seed) {
        const MaxStableField exact = simulate_m3(law, grid, RngStream(seed), cfg);
        M3Config longer = cfg;
        longer.sim = fixed_cfg(exact.truncation.n_used + 100);
        const MaxStableField more = simulate_m3(law, grid, RngStream(seed), longer);
        for (std::size_t f = 0; f < exact.values.size(); ++f)
            CHECK(exact.values[f] == more.values[f]);
    }
}

TEST_CASE("m3 with one atom is a translated scaled shape") {
    const Grid grid = Grid::lattice1d(6);
    const ShapeLaw law = shape_law_from_model(SpectralModel::compact_bump(), grid);
    M3Config cfg;
    cfg.padding = 1.0;
    cfg.sim = fixed_cfg(1);
    const MaxStableField field = simulate_m3(law, grid, RngStream(42), cfg);
    REQUIRE(field.atoms.size() == 1);
    const Atom& atom = field.atoms[0];
    REQUIRE(atom.origin.has_value());
    const long x0 = (*atom.origin)[0];
    for (long i = grid.lo[0]; i <= grid.hi[0]; ++i) {
        const double expected =
            atom.u * bump_value(CompactBumpModel{}, grid.coord(i) - grid.coord(x0));
        CHECK(field.values[grid.flat(i)] == expected);
    }
}

TEST_CASE("m3 field is stationary across the window") {
    const Grid grid = Grid::lattice1d(8);
    const ShapeLaw law = shape_law_from_model(SpectralModel::compact_bump(), grid);
    M3Config cfg;
    cfg.padding = 1.0;
    cfg.sim = threshold_cfg();
    const std::size_t n = 10000;
    std::vector<double> at0(n), at5(n);
    RngStream root(2024);
    for (std::size_t i = 0; i < n; ++i) {
        const MaxStableField f = simulate_m3(law, grid, root.derive(i), cfg);
        at0[i] = f.values[grid.flat(0)];
        at5[i] = f.values[grid.flat(5)];
    }
    CHECK(ks_distance_two_sample(at0, at5) < 0.02);
}

TEST_CASE("m3 level counts match the padded-window intensity") {
    // E[#atoms with V >= a] = lambda(padded window)/a
    const Grid grid = Grid::lattice1d(2);
    const ShapeLaw law = shape_law_from_model(SpectralModel::compact_bump(), grid);
    M3Config cfg;
    cfg.padding = 1.0;
    cfg.sim = fixed_cfg(60);
    const double area = 7.0;  // lattice points in [-3, 3]
    const double a = 2.0;
    const std::size_t n = 2000;
    double total = 0.0;
    RngStream root(31337);
    for (std::size_t i = 0; i < n; ++i) {
        const MaxStableField f = simulate_m3(law, grid, root.derive(i), cfg);
        std::size_t count = 0;
        for (const auto& atom : f.atoms) count += atom.u >= a;
        total += static_cast<double>(count);
    }
    const double mean = total / static_cast<double>(n);
    const double se = std::sqrt((area / a) / static_cast<double>(n));
    CHECK(std::abs(mean - area / a) < 3.0 * se);
}

TEST_CASE("pointwise max and rescale") {
    const Grid grid = Grid::lattice1d(4);
    const auto model = SpectralModel::brown_resnick(10);
    const MaxStableField f = simulate_dehaan(model, grid, RngStream(1), fixed_cfg(5));
    const MaxStableField g = simulate_dehaan(model, grid, RngStream(2), fixed_cfg(5));

    const MaxStableField ff = pointwise_max(f, f);
    for (std::size_t i = 0; i < f.values.size(); ++i) CHECK(ff.values[i] == f.values[i]);
    CHECK(ff.atoms.size() == 2 * f.atoms.size());

    const MaxStableField r1 = rescale(f, 1.0);
    for (std::size_t i = 0; i < f.values.size(); ++i) CHECK(r1.values[i] == f.values[i]);

    const MaxStableField fg = pointwise_max(f, g);
    for (std::size_t i = 0; i < f.values.size(); ++i)
        CHECK(fg.values[i] == std::max(f.values[i], g.values[i]));

    const Grid other = Grid::lattice1d(5);
    const MaxStableField h = simulate_dehaan(model, other, RngStream(3), fixed_cfg(2));
    CHECK_THROWS_AS((void)pointwise_max(f, h), DataError);
    CHECK_THROWS_AS((void)rescale(f, 0.0), std::invalid_argument);
}

TEST_CASE("field values are recomputable from the atom log") {
    const Grid grid = Grid::continuous1d(2.0, 0.5);
    SUBCASE("de Haan, fixed_n") {
        const MaxStableField f = simulate_dehaan(SpectralModel::brown_resnick(10), grid,
                                                 RngStream(9), fixed_cfg(50));
        const std::vector<double> re = recompute_values(f);
        for (std::size_t i = 0; i < f.values.size(); ++i) CHECK(re[i] == f.values[i]);
    }
    SUBCASE("moving maximum, threshold") {
        const ShapeLaw law = shape_law_from_model(SpectralModel::compact_bump(), grid);
        M3Config cfg;
        cfg.padding = 1.0;
        cfg.sim = threshold_cfg();
        const MaxStableField f = simulate_m3(law, grid, RngStream(10), cfg);
        const std::vector<double> re = recompute_values(f);
        for (std::size_t i = 0; i < f.values.size(); ++i) CHECK(re[i] == f.values[i]);
    }
}

TEST_CASE("atom log cap is flagged, not silent") {
    const Grid grid = Grid::lattice1d(2);
    SimConfig cfg = fixed_cfg(10);
    cfg.atom_log_cap = 5;
    const MaxStableField f =
        simulate_dehaan(SpectralModel::constant(1.0), grid, RngStream(4), cfg);
    CHECK(f.atoms.size() == 5);
    CHECK_FALSE(f.truncation.atom_log_complete);
    CHECK(f.truncation.n_used == 10);
}

TEST_CASE("max-stability: rescaled 10-fold max of constant fields is Frechet") {
    const auto model = SpectralModel::constant(1.0);
    const Grid grid = Grid::lattice1d(1);
    const std::size_t n = 20000;
    const unsigned folds = 10;
    std::vector<double> folded(n);
    RngStream root(555);
    for (std::size_t i = 0; i < n; ++i) {
        double m = 0.0;
        for (unsigned j = 0; j < folds; ++j) {
            const MaxStableField f =
                simulate_dehaan(model, grid, root.derive(i, j), threshold_cfg());
            m = std::max(m, f.values[0]);
        }
        folded[i] = m / folds;
    }
    const double d = ks_distance(folded, [](double z) { return std::exp(-1.0 / z); });
    CHECK(d < 0.015);
}

TEST_CASE("contract violations are rejected") {
    const Grid grid = Grid::lattice1d(4);
    CHECK_THROWS_AS((void)simulate_dehaan(SpectralModel::brown_resnick(10), grid,
                                          RngStream(1), threshold_cfg()),
                    std::invalid_argument);
    CHECK_THROWS_AS((void)simulate_dehaan(SpectralModel::constant(1.0), grid, RngStream(1),
                                          fixed_cfg(0)),
                    std::invalid_argument);
    const ShapeLaw law = shape_law_from_model(SpectralModel::compact_bump(), grid);
    M3Config bad;
    bad.padding = 0.5;  // below the support radius
    bad.sim = threshold_cfg();
    CHECK_THROWS_AS((void)simulate_m3(law, grid, RngStream(1), bad), std::invalid_argument);

    // the atom-count guard turns a non-terminating threshold run into an error
    SimConfig guarded = threshold_cfg();
    guarded.max_atoms = 0;
    CHECK_THROWS_AS((void)simulate_dehaan(SpectralModel::constant(1.0), grid, RngStream(1),
                                          guarded),
                    NumericError);
}

TEST_CASE("point-field simulator agrees with the windowed simulator in law") {
    const auto model = SpectralModel::constant(1.0);
    SimConfig cfg = threshold_cfg();
    const PointFieldSimulator sim(model, {0.0}, cfg);
    const std::size_t n = 20000;
    std::vector<double> vals(n);
    RngStream root(777);
    for (std::size_t i = 0; i < n; ++i) vals[i] = sim.simulate(root.derive(i))[0];
    const double d = ks_distance(vals, [](double z) { return std::exp(-1.0 / z); });
    CHECK(d < 0.015);
}
