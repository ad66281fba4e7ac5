#include "maxstab/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "maxstab/errors.hpp"

namespace maxstab {

namespace {

void max_into(std::vector<double>& acc, double level, const std::vector<double>& path) {
    for (std::size_t i = 0; i < acc.size(); ++i)
        acc[i] = std::max(acc[i], level * path[i]);
}

double min_over_mask(const std::vector<double>& values, const std::vector<std::uint8_t>& mask) {
    double m = std::numeric_limits<double>::infinity();
    bool any = false;
    for (std::size_t i = 0; i < values.size(); ++i)
        if (mask[i]) { m = std::min(m, values[i]); any = true; }
    return any ? m : std::numeric_limits<double>::infinity();
}

std::vector<std::uint8_t> mass_mask_on_grid(const SpectralModel& model, const Grid& grid) {
    std::vector<std::uint8_t> mask(grid.size(), 0);
    if (grid.dim == 1) {
        for (long i = grid.lo[0]; i <= grid.hi[0]; ++i)
            mask[grid.flat(i)] = model.mean_at(grid.coord(i)) > 0.0 ? 1 : 0;
    } else {
        for (long i = grid.lo[0]; i <= grid.hi[0]; ++i)
            for (long j = grid.lo[1]; j <= grid.hi[1]; ++j)
                mask[grid.flat(i, j)] =
                    model.mean_at({grid.coord(i), grid.coord(j)}) > 0.0 ? 1 : 0;
    }
    return mask;
}

void log_atom(MaxStableField& field, const SimConfig& cfg, Atom atom) {
    if (field.atoms.size() < cfg.atom_log_cap)
        field.atoms.push_back(std::move(atom));
    else
        field.truncation.atom_log_complete = false;
}

} // namespace

MaxStableField simulate_dehaan(const SpectralModel& model, const Grid& grid,
                               RngStream rng, const SimConfig& cfg) {
    MaxStableField field;
    field.grid = grid;
    field.values.assign(grid.size(), 0.0);
    field.truncation.mode = cfg.mode;

    PoissonArrivals levels(rng.derive(kLevelStreamTag));

    if (cfg.mode == Truncation::Mode::fixed_n) {
        if (cfg.n_atoms < 1)
            throw std::invalid_argument("simulate_dehaan: fixed_n mode needs n_atoms >= 1");
        for (std::size_t i = 0; i < cfg.n_atoms; ++i) {
            const double u = levels.next_level();
            RngStream atom_rng = rng.derive(kAtomStreamTag, i);
            SpectralPath path = sample_path(model, grid, atom_rng);
            max_into(field.values, u, path.values);
            log_atom(field, cfg, Atom{u, std::move(path), {}, {}, {}});
        }
        field.truncation.n_used = cfg.n_atoms;
        field.truncation.exact = false;
        return field;
    }

    // threshold mode
    const std::optional<double> tau = cfg.sup_bound ? cfg.sup_bound : model.sup_bound();
    if (!tau)
        throw std::invalid_argument(
            "simulate_dehaan: threshold mode needs an a.s. sup bound; model '" +
            model.name() + "' is unbounded, use fixed_n");
    const auto mask = mass_mask_on_grid(model, grid);

    std::size_t drawn = 0;
    while (true) {
        const double u_next = levels.next_level();
        // min over reachable points; +inf when the model has no mass on the
        // window at all, in which case one atom settles the (zero) field
        if (drawn > 0 && u_next * (*tau) <= min_over_mask(field.values, mask)) break;
        if (drawn >= cfg.max_atoms)
            throw NumericError("simulate_dehaan: threshold stopping exceeded max_atoms; "
                               "is the sup bound valid for this model?");
        RngStream atom_rng = rng.derive(kAtomStreamTag, drawn);
        SpectralPath path = sample_path(model, grid, atom_rng);
        max_into(field.values, u_next, path.values);
        log_atom(field, cfg, Atom{u_next, std::move(path), {}, {}, {}});
        ++drawn;
    }
    field.truncation.n_used = drawn;
    field.truncation.exact = true;
    return field;
}

ShapeLaw shape_law_from_model(const SpectralModel& model, const Grid& grid) {
    if (!model.is_shape())
        throw std::invalid_argument("shape_law_from_model: model '" + model.name() +
                                    "' is not a compactly supported shape");
    ShapeLaw law;
    law.dim = grid.dim;
    law.support_radius = model.support_radius();
    law.sup_bound = *model.sup_bound();

    if (const auto* bump = std::get_if<CompactBumpModel>(&model.variant)) {
        const CompactBumpModel b = *bump;
        const int dim = grid.dim;
        law.draw = [b, dim](RngStream&) {
            return ShapeDraw{[b, dim](double dx, double dy) {
                                 return dim == 2 ? bump_value2(b, dx, dy)
                                                 : bump_value(b, dx);
                             },
                             b.height};
        };
        // quadrature-measure integral on this grid's spacing
        const double h = grid.cell_weight();
        double integral = 0.0;
        const long n = grid.box_index_bound(b.support_radius);
        if (grid.dim == 1) {
            for (long i = -n; i <= n; ++i)
                integral += bump_value(b, static_cast<double>(i) * grid.spacing);
        } else {
            for (long i = -n; i <= n; ++i)
                for (long j = -n; j <= n; ++j)
                    integral += bump_value2(b, static_cast<double>(i) * grid.spacing,
                                            static_cast<double>(j) * grid.spacing);
        }
        law.mean_integral = integral * h;
        return law;
    }

    const auto& comb = std::get<CombModel>(model.variant);
    if (grid.dim != 1)
        throw std::invalid_argument("shape_law_from_model: comb is one-dimensional");
    const long n_bumps =
        comb.n_bumps > 0 ? comb.n_bumps
                         : static_cast<long>(std::floor(grid.covered_radius())) + 1;
    law.support_radius =
        static_cast<double>(n_bumps) + 1.0 / (static_cast<double>(n_bumps) * n_bumps);
    law.sup_bound = comb_sup(n_bumps);
    law.draw = [n_bumps](RngStream&) {
        return ShapeDraw{[n_bumps](double dx, double) { return comb_value(dx, n_bumps); },
                         comb_sup(n_bumps)};
    };
    law.mean_integral = comb_integral(-law.support_radius, law.support_radius, n_bumps);
    return law;
}

ShapeLaw shape_law_from_paths(std::vector<SpectralPath> pool) {
    if (pool.empty())
        throw std::invalid_argument("shape_law_from_paths: empty pool");
    const Grid shape_grid_like = pool.front().grid;
    double sup = 0.0;
    double mean_integral = 0.0;
    double support = 0.0;
    for (const auto& p : pool) {
        if (p.grid.dim != 1)
            throw std::invalid_argument("shape_law_from_paths: d = 1 pools only");
        if (p.grid.spacing != shape_grid_like.spacing ||
            p.grid.lattice != shape_grid_like.lattice)
            throw std::invalid_argument("shape_law_from_paths: pool grids must share spacing");
        sup = std::max(sup, p.max_value());
        mean_integral += box_integral(p, p.grid.covered_radius());
        for (long i = p.grid.lo[0]; i <= p.grid.hi[0]; ++i)
            if (p.values[p.grid.flat(i)] > 0.0)
                support = std::max(support, std::abs(p.grid.coord(i)));
    }
    mean_integral /= static_cast<double>(pool.size());

    ShapeLaw law;
    law.dim = 1;
    law.support_radius = support;
    law.sup_bound = sup;
    law.mean_integral = mean_integral;
    auto shared = std::make_shared<std::vector<SpectralPath>>(std::move(pool));
    law.draw = [shared](RngStream& rng) {
        const std::size_t k = static_cast<std::size_t>(
            rng.uniform01() * static_cast<double>(shared->size()));
        const SpectralPath& z = (*shared)[std::min(k, shared->size() - 1)];
        return ShapeDraw{[&z](double dx, double) {
                             const long idx = std::lround(dx / z.grid.spacing);
                             if (std::abs(dx - static_cast<double>(idx) * z.grid.spacing) >
                                 1e-9 * std::max(1.0, std::abs(dx)))
                                 return 0.0;  // off-grid offsets carry no mass
                             return z.grid.contains_index(idx) ? z.values[z.grid.flat(idx)]
                                                               : 0.0;
                         },
                         z.max_value()};
    };
    return law;
}

MaxStableField simulate_m3(const ShapeLaw& shape, const Grid& grid, RngStream rng,
                           const M3Config& cfg) {
    if (cfg.padding < shape.support_radius - 1e-12)
        throw std::invalid_argument(
            "simulate_m3: padding must cover the shape support radius "
            "(boundary atoms would be wrongly excluded)");
    if (shape.dim != grid.dim)
        throw std::invalid_argument("simulate_m3: shape and grid dimension mismatch");

    MaxStableField field;
    field.grid = grid;
    field.values.assign(grid.size(), 0.0);
    field.truncation.mode = cfg.sim.mode;

    // positions live on the padded window grid; intensity is the quadrature
    // measure, so lambda(padded) = point count * cell weight
    const long pad = grid.box_index_bound(cfg.padding);
    const std::array<long, 2> plo{grid.lo[0] - pad, grid.dim == 2 ? grid.lo[1] - pad : 0};
    const std::array<long, 2> phi{grid.hi[0] + pad, grid.dim == 2 ? grid.hi[1] + pad : 0};
    const double count0 = static_cast<double>(phi[0] - plo[0] + 1);
    const double count1 = grid.dim == 2 ? static_cast<double>(phi[1] - plo[1] + 1) : 1.0;
    const double area = count0 * count1 * grid.cell_weight();

    PoissonArrivals levels(rng.derive(kLevelStreamTag));
    RngStream pos_rng = rng.derive(kPositionStreamTag);

    auto draw_position = [&](std::size_t) {
        std::array<long, 2> x{0, 0};
        x[0] = plo[0] + static_cast<long>(pos_rng.uniform01() * count0);
        x[0] = std::min(x[0], phi[0]);
        if (grid.dim == 2) {
            x[1] = plo[1] + static_cast<long>(pos_rng.uniform01() * count1);
            x[1] = std::min(x[1], phi[1]);
        }
        return x;
    };

    auto add_atom = [&](double v, std::size_t index) {
        const std::array<long, 2> pos = draw_position(index);
        RngStream atom_rng = rng.derive(kAtomStreamTag, index);
        ShapeDraw z = shape.draw(atom_rng);
        Atom atom;
        atom.u = v;
        atom.origin = pos;
        atom.path.grid = grid;
        atom.path.values.assign(grid.size(), 0.0);
        if (grid.dim == 1) {
            for (long i = grid.lo[0]; i <= grid.hi[0]; ++i) {
                const double val = z.eval(grid.coord(i) - grid.coord(pos[0]), 0.0);
                atom.path.values[grid.flat(i)] = val;
                field.values[grid.flat(i)] = std::max(field.values[grid.flat(i)], v * val);
            }
        } else {
            for (long i = grid.lo[0]; i <= grid.hi[0]; ++i)
                for (long j = grid.lo[1]; j <= grid.hi[1]; ++j) {
                    const double val = z.eval(grid.coord(i) - grid.coord(pos[0]),
                                              grid.coord(j) - grid.coord(pos[1]));
                    atom.path.values[grid.flat(i, j)] = val;
                    field.values[grid.flat(i, j)] =
                        std::max(field.values[grid.flat(i, j)], v * val);
                }
        }
        log_atom(field, cfg.sim, std::move(atom));
    };

    if (cfg.sim.mode == Truncation::Mode::fixed_n) {
        if (cfg.sim.n_atoms < 1)
            throw std::invalid_argument("simulate_m3: fixed_n mode needs n_atoms >= 1");
        for (std::size_t i = 0; i < cfg.sim.n_atoms; ++i)
            add_atom(area * levels.next_level(), i);
        field.truncation.n_used = cfg.sim.n_atoms;
        field.truncation.exact = false;
        return field;
    }

    const double tau = cfg.sim.sup_bound.value_or(shape.sup_bound);
    std::size_t drawn = 0;
    while (true) {
        const double v_next = area * levels.next_level();
        if (drawn > 0) {
            const double current_min =
                *std::min_element(field.values.begin(), field.values.end());
            if (v_next * tau <= current_min) break;
        }
        if (drawn >= cfg.sim.max_atoms)
            throw NumericError("simulate_m3: threshold stopping exceeded max_atoms; "
                               "is the shape sup bound valid?");
        add_atom(v_next, drawn);
        ++drawn;
    }
    field.truncation.n_used = drawn;
    field.truncation.exact = true;
    return field;
}

MaxStableField pointwise_max(const MaxStableField& a, const MaxStableField& b) {
    if (!a.grid.same_shape(b.grid))
        throw DataError("pointwise_max: grid mismatch");
    MaxStableField out;
    out.grid = a.grid;
    out.values.resize(a.values.size());
    for (std::size_t i = 0; i < out.values.size(); ++i)
        out.values[i] = std::max(a.values[i], b.values[i]);
    out.atoms = a.atoms;
    out.atoms.insert(out.atoms.end(), b.atoms.begin(), b.atoms.end());
    std::stable_sort(out.atoms.begin(), out.atoms.end(),
                     [](const Atom& x, const Atom& y) { return x.u > y.u; });
    out.truncation.mode = a.truncation.mode;
    out.truncation.n_used = a.truncation.n_used + b.truncation.n_used;
    out.truncation.exact = a.truncation.exact && b.truncation.exact;
    out.truncation.atom_log_complete =
        a.truncation.atom_log_complete && b.truncation.atom_log_complete;
    return out;
}

MaxStableField rescale(const MaxStableField& f, double factor) {
    if (!(factor > 0.0)) throw std::invalid_argument("rescale: factor must be > 0");
    MaxStableField out = f;
    for (auto& v : out.values) v *= factor;
    for (auto& atom : out.atoms) atom.u *= factor;
    return out;
}

std::vector<double> recompute_values(const MaxStableField& f) {
    std::vector<double> acc(f.values.size(), 0.0);
    for (const auto& atom : f.atoms) max_into(acc, atom.u, atom.path.values);
    return acc;
}

PointFieldSimulator::PointFieldSimulator(const SpectralModel& model,
                                         std::vector<double> points, SimConfig cfg,
                                         bool force_cholesky)
    : points_(std::move(points)), cfg_(cfg) {
    sampler_.emplace(model, points_, force_cholesky);
    mass_mask_.resize(points_.size());
    for (std::size_t i = 0; i < points_.size(); ++i)
        mass_mask_[i] = model.mean_at(points_[i]) > 0.0 ? 1 : 0;
    if (cfg_.mode == Truncation::Mode::threshold) {
        tau_ = cfg_.sup_bound ? cfg_.sup_bound : model.sup_bound();
        if (!tau_)
            throw std::invalid_argument("point simulator: threshold mode on unbounded model");
    }
}

PointFieldSimulator::PointFieldSimulator(ShapeLaw shape, std::vector<double> points,
                                         double padding, double position_spacing,
                                         bool position_lattice, SimConfig cfg)
    : points_(std::move(points)), cfg_(cfg), shape_(std::move(shape)) {
    if (padding < shape_->support_radius - 1e-12)
        throw std::invalid_argument("point simulator: padding must cover the shape support");
    if (position_lattice && position_spacing != 1.0)
        throw std::invalid_argument("point simulator: lattice positions need spacing 1");
    pos_spacing_ = position_spacing;
    const auto [mn, mx] = std::minmax_element(points_.begin(), points_.end());
    pos_lo_ = static_cast<long>(std::floor((*mn - padding) / position_spacing));
    pos_hi_ = static_cast<long>(std::ceil((*mx + padding) / position_spacing));
    const double count = static_cast<double>(pos_hi_ - pos_lo_ + 1);
    pos_area_ = count * (position_lattice ? 1.0 : position_spacing);
    if (cfg_.mode == Truncation::Mode::threshold && !cfg_.sup_bound)
        cfg_.sup_bound = shape_->sup_bound;
}

std::vector<double> PointFieldSimulator::simulate(RngStream rep_rng) const {
    std::vector<double> values(points_.size(), 0.0);
    PoissonArrivals levels(rep_rng.derive(kLevelStreamTag));

    if (shape_) {
        RngStream pos_rng = rep_rng.derive(kPositionStreamTag);
        const double count = static_cast<double>(pos_hi_ - pos_lo_ + 1);
        std::size_t drawn = 0;
        while (true) {
            const double v = pos_area_ * levels.next_level();
            if (cfg_.mode == Truncation::Mode::threshold) {
                if (drawn > 0 &&
                    v * (*cfg_.sup_bound) <=
                        *std::min_element(values.begin(), values.end()))
                    break;
                if (drawn >= cfg_.max_atoms)
                    throw NumericError("point simulator: threshold exceeded max_atoms");
            } else if (drawn >= cfg_.n_atoms) {
                break;
            }
            long pos = pos_lo_ + static_cast<long>(pos_rng.uniform01() * count);
            pos = std::min(pos, pos_hi_);
            RngStream atom_rng = rep_rng.derive(kAtomStreamTag, drawn);
            ShapeDraw z = shape_->draw(atom_rng);
            const double x0 = static_cast<double>(pos) * pos_spacing_;
            for (std::size_t i = 0; i < points_.size(); ++i)
                values[i] = std::max(values[i], v * z.eval(points_[i] - x0, 0.0));
            ++drawn;
        }
        return values;
    }

    std::size_t drawn = 0;
    while (true) {
        const double u = levels.next_level();
        if (cfg_.mode == Truncation::Mode::threshold) {
            if (drawn > 0 && u * (*tau_) <= min_over_mask(values, mass_mask_)) break;
            if (drawn >= cfg_.max_atoms)
                throw NumericError("point simulator: threshold exceeded max_atoms");
        } else if (drawn >= cfg_.n_atoms) {
            break;
        }
        RngStream atom_rng = rep_rng.derive(kAtomStreamTag, drawn);
        const std::vector<double> y = sampler_->sample(atom_rng);
        for (std::size_t i = 0; i < points_.size(); ++i)
            values[i] = std::max(values[i], u * y[i]);
        ++drawn;
    }
    return values;
}

} // namespace maxstab
