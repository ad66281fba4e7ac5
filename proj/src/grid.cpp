#include "maxstab/grid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace maxstab {

namespace {
// Accepts coordinates within half a spacing's rounding slack of the box edge.
constexpr double kEdgeTol = 1e-9;
} // namespace

Grid Grid::lattice1d(long radius) {
    Grid g;
    g.dim = 1;
    g.lattice = true;
    g.spacing = 1.0;
    g.lo = {-radius, 0};
    g.hi = {radius, 0};
    return g;
}

Grid Grid::lattice2d(long radius) {
    Grid g = lattice1d(radius);
    g.dim = 2;
    g.lo[1] = -radius;
    g.hi[1] = radius;
    return g;
}

Grid Grid::continuous1d(double radius, double h) {
    if (!(h > 0.0) || !(radius >= 0.0))
        throw std::invalid_argument("continuous grid: need h > 0 and radius >= 0");
    Grid g;
    g.dim = 1;
    g.lattice = false;
    g.spacing = h;
    const long n = static_cast<long>(std::floor(radius / h + kEdgeTol));
    g.lo = {-n, 0};
    g.hi = {n, 0};
    return g;
}

Grid Grid::continuous2d(double radius, double h) {
    Grid g = continuous1d(radius, h);
    g.dim = 2;
    g.lo[1] = g.lo[0];
    g.hi[1] = g.hi[0];
    return g;
}

double Grid::covered_radius() const {
    long m = std::min(-lo[0], hi[0]);
    if (dim == 2) m = std::min(m, std::min(-lo[1], hi[1]));
    return static_cast<double>(m) * spacing;
}

long Grid::box_index_bound(double r) const {
    return static_cast<long>(std::floor(r / spacing + kEdgeTol));
}

bool SpectralPath::is_zero() const {
    for (double v : values)
        if (v != 0.0) return false;
    return true;
}

double SpectralPath::max_value() const {
    double m = 0.0;
    for (double v : values) m = std::max(m, v);
    return m;
}

namespace {

// Applies fn(flat_index) to every grid point of B_r.
template <typename Fn>
void for_box(const Grid& g, double r, Fn&& fn) {
    const long b = g.box_index_bound(r);
    const long lo0 = std::max(g.lo[0], -b), hi0 = std::min(g.hi[0], b);
    if (g.dim == 1) {
        for (long i = lo0; i <= hi0; ++i) fn(g.flat(i));
        return;
    }
    const long lo1 = std::max(g.lo[1], -b), hi1 = std::min(g.hi[1], b);
    for (long i = lo0; i <= hi0; ++i)
        for (long j = lo1; j <= hi1; ++j) fn(g.flat(i, j));
}

// Applies fn to every grid point of B_r \ B_{r_inner}.
template <typename Fn>
void for_annulus(const Grid& g, double r_inner, double r, Fn&& fn) {
    const long b = g.box_index_bound(r);
    const long a = r_inner > 0.0 ? g.box_index_bound(r_inner) : -1;
    const long lo0 = std::max(g.lo[0], -b), hi0 = std::min(g.hi[0], b);
    if (g.dim == 1) {
        for (long i = lo0; i <= hi0; ++i)
            if (std::labs(i) > a) fn(g.flat(i));
        return;
    }
    const long lo1 = std::max(g.lo[1], -b), hi1 = std::min(g.hi[1], b);
    for (long i = lo0; i <= hi0; ++i)
        for (long j = lo1; j <= hi1; ++j)
            if (std::max(std::labs(i), std::labs(j)) > a) fn(g.flat(i, j));
}

} // namespace

double box_integral(const SpectralPath& path, double r) {
    const double w = path.grid.cell_weight();
    double acc = 0.0;
    if (path.has_mass()) {
        for_box(path.grid, r, [&](std::size_t f) { acc += path.cell_mass[f]; });
    } else {
        for_box(path.grid, r, [&](std::size_t f) { acc += path.values[f]; });
        acc *= w;
    }
    return acc;
}

double box_measure(const Grid& grid, double r) {
    const long b = std::min(grid.box_index_bound(r),
                            std::min(-grid.lo[0], grid.hi[0]));
    double count = static_cast<double>(2 * b + 1);
    if (grid.dim == 2) {
        const long b1 = std::min(grid.box_index_bound(r),
                                 std::min(-grid.lo[1], grid.hi[1]));
        count *= static_cast<double>(2 * b1 + 1);
    }
    return count * grid.cell_weight();
}

double annulus_sup(const SpectralPath& path, double r) {
    double m = 0.0;
    for_annulus(path.grid, r / 2.0, r, [&](std::size_t f) { m = std::max(m, path.values[f]); });
    return m;
}

double box_sup(const SpectralPath& path, double r) {
    double m = 0.0;
    for_box(path.grid, r, [&](std::size_t f) { m = std::max(m, path.values[f]); });
    return m;
}

std::vector<double> box_integrals(const SpectralPath& path, const std::vector<double>& radii) {
    std::vector<double> out;
    out.reserve(radii.size());
    const double w = path.grid.cell_weight();
    double acc = 0.0;
    double prev_r = 0.0;
    bool first = true;
    for (double r : radii) {
        double shell = 0.0;
        if (path.has_mass()) {
            if (first)
                for_box(path.grid, r, [&](std::size_t f) { shell += path.cell_mass[f]; });
            else
                for_annulus(path.grid, prev_r, r, [&](std::size_t f) { shell += path.cell_mass[f]; });
        } else {
            if (first)
                for_box(path.grid, r, [&](std::size_t f) { shell += path.values[f]; });
            else
                for_annulus(path.grid, prev_r, r, [&](std::size_t f) { shell += path.values[f]; });
            shell *= w;
        }
        acc += shell;
        out.push_back(acc);
        prev_r = r;
        first = false;
    }
    return out;
}

SpectralPath sup_smooth(const SpectralPath& path, double halfwidth) {
    const Grid& g = path.grid;
    const long w = g.box_index_bound(halfwidth);
    SpectralPath out;
    out.grid = g;
    out.values.assign(path.values.size(), 0.0);

    auto smooth_axis0 = [&](const std::vector<double>& in, std::vector<double>& res) {
        // Plain windowed max per point; window extents are modest (halfwidth
        // a handful of cells) so the direct scan is fine.
        if (g.dim == 1) {
            for (long i = g.lo[0]; i <= g.hi[0]; ++i) {
                double m = 0.0;
                for (long k = std::max(g.lo[0], i - w); k <= std::min(g.hi[0], i + w); ++k)
                    m = std::max(m, in[g.flat(k)]);
                res[g.flat(i)] = m;
            }
            return;
        }
        for (long j = g.lo[1]; j <= g.hi[1]; ++j)
            for (long i = g.lo[0]; i <= g.hi[0]; ++i) {
                double m = 0.0;
                for (long k = std::max(g.lo[0], i - w); k <= std::min(g.hi[0], i + w); ++k)
                    m = std::max(m, in[g.flat(k, j)]);
                res[g.flat(i, j)] = m;
            }
    };

    smooth_axis0(path.values, out.values);
    if (g.dim == 2) {
        std::vector<double> tmp = out.values;
        for (long i = g.lo[0]; i <= g.hi[0]; ++i)
            for (long j = g.lo[1]; j <= g.hi[1]; ++j) {
                double m = 0.0;
                for (long k = std::max(g.lo[1], j - w); k <= std::min(g.hi[1], j + w); ++k)
                    m = std::max(m, tmp[g.flat(i, k)]);
                out.values[g.flat(i, j)] = m;
            }
    }
    return out;
}

} // namespace maxstab
