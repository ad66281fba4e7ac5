#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace maxstab {

/// Rectangular evaluation window in d=1 or d=2. Point k (per dim) sits at
/// coordinate k*spacing, so the origin is always on the grid and, for
/// spacing = 1/m, so is every integer. Lattice grids carry the counting
/// measure; continuous grids the cell quadrature weight spacing^dim.
struct Grid {
    int dim = 1;
    bool lattice = true;
    double spacing = 1.0;
    std::array<long, 2> lo{0, 0};
    std::array<long, 2> hi{0, 0};

    static Grid lattice1d(long radius);
    static Grid lattice2d(long radius);
    static Grid continuous1d(double radius, double h);
    static Grid continuous2d(double radius, double h);

    long extent(int k) const { return hi[static_cast<std::size_t>(k)] - lo[static_cast<std::size_t>(k)] + 1; }
    std::size_t size() const {
        std::size_t n = static_cast<std::size_t>(extent(0));
        return dim == 2 ? n * static_cast<std::size_t>(extent(1)) : n;
    }

    /// Measure of one grid cell (1 on lattices, spacing^dim otherwise).
    double cell_weight() const {
        if (lattice) return 1.0;
        return dim == 2 ? spacing * spacing : spacing;
    }

    std::size_t flat(long i0, long i1 = 0) const {
        const std::size_t off0 = static_cast<std::size_t>(i0 - lo[0]);
        if (dim == 1) return off0;
        return off0 * static_cast<std::size_t>(extent(1)) + static_cast<std::size_t>(i1 - lo[1]);
    }

    std::array<long, 2> unflat(std::size_t f) const {
        if (dim == 1) return {lo[0] + static_cast<long>(f), 0};
        const auto e1 = static_cast<std::size_t>(extent(1));
        return {lo[0] + static_cast<long>(f / e1), lo[1] + static_cast<long>(f % e1)};
    }

    double coord(long index) const { return static_cast<double>(index) * spacing; }

    bool contains_index(long i0, long i1 = 0) const {
        if (i0 < lo[0] || i0 > hi[0]) return false;
        if (dim == 2 && (i1 < lo[1] || i1 > hi[1])) return false;
        return true;
    }

    /// Largest |coordinate| (sup norm) covered in every direction: the radius
    /// r such that B_r = [-r,r]^d lies inside the window.
    double covered_radius() const;

    /// Index bound j such that |coord(j)| <= r, clipped to the window.
    long box_index_bound(double r) const;

    bool same_shape(const Grid& other) const {
        return dim == other.dim && lattice == other.lattice &&
               spacing == other.spacing && lo == other.lo && hi == other.hi;
    }
};

/// One spectral path: values on a grid window, optionally with exact per-cell
/// masses for shapes whose features are narrower than the grid spacing (the
/// comb). Quadrature uses masses when present and pointwise values otherwise;
/// sup-based statistics always use the pointwise values.
struct SpectralPath {
    Grid grid;
    std::vector<double> values;
    std::vector<double> cell_mass;  // empty, or one entry per grid point

    bool has_mass() const { return !cell_mass.empty(); }
    bool is_zero() const;
    double max_value() const;
    double max_abs() const { return max_value(); }
};

/// Integral of the path over the box B_r (quadrature measure).
double box_integral(const SpectralPath& path, double r);

/// Measure lambda(B_r) of the box under the grid's quadrature measure.
double box_measure(const Grid& grid, double r);

/// Sup of pointwise values over the annulus B_r \ B_{r/2}.
double annulus_sup(const SpectralPath& path, double r);

/// Sup of pointwise values over B_r.
double box_sup(const SpectralPath& path, double r);

/// I_r for every radius in `radii` (ascending), accumulated annulus-by-annulus
/// so the sequence is nondecreasing exactly (sums of nonnegative terms are
/// only ever added, never recomputed).
std::vector<double> box_integrals(const SpectralPath& path, const std::vector<double>& radii);

/// Moving maximum over the centered box of half-width `halfwidth` (in
/// coordinate units), clamped at the window boundary. d=2 applies the filter
/// separably.
SpectralPath sup_smooth(const SpectralPath& path, double halfwidth);

} // namespace maxstab
