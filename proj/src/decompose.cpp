#include "maxstab/decompose.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "maxstab/errors.hpp"

namespace maxstab {

const char* to_string(UnassignedPolicy policy) {
    switch (policy) {
        case UnassignedPolicy::strict: return "strict";
        case UnassignedPolicy::assign_to_part1: return "assign_to_part1";
        case UnassignedPolicy::assign_to_part2: return "assign_to_part2";
    }
    return "?";
}

namespace {

void max_atom_into(std::vector<double>& acc, const Atom& atom) {
    for (std::size_t i = 0; i < acc.size(); ++i)
        acc[i] = std::max(acc[i], atom.u * atom.path.values[i]);
}

MaxStableField empty_like(const MaxStableField& field) {
    MaxStableField out;
    out.grid = field.grid;
    out.values.assign(field.values.size(), 0.0);
    out.truncation = field.truncation;
    out.truncation.n_used = 0;
    return out;
}

} // namespace

std::vector<double> Decomposition::unassigned_values() const {
    std::vector<double> acc(part1.values.size(), 0.0);
    for (const auto& atom : unassigned) max_atom_into(acc, atom);
    return acc;
}

Decomposition split_atoms(const MaxStableField& field, ConeAxis axis,
                          std::span<const ConeLabel> labels, UnassignedPolicy policy) {
    if (!field.truncation.atom_log_complete)
        throw DataError("split_atoms: atom log overflowed; decomposition would not "
                        "reconstruct the field");
    if (labels.size() != field.atoms.size())
        throw DataError("split_atoms: need one verdict per atom (" +
                        std::to_string(field.atoms.size()) + " atoms, " +
                        std::to_string(labels.size()) + " labels)");

    const ConeLabel first = axis == ConeAxis::hopf ? ConeLabel::conservative
                                                   : ConeLabel::positive;
    const ConeLabel second = axis == ConeAxis::hopf ? ConeLabel::dissipative
                                                    : ConeLabel::null_recurrent;

    Decomposition dec;
    dec.axis = axis;
    dec.policy = policy;
    dec.part1 = empty_like(field);
    dec.part2 = empty_like(field);

    for (std::size_t i = 0; i < field.atoms.size(); ++i) {
        const ConeLabel label = labels[i];
        if (label != first && label != second && label != ConeLabel::inconclusive)
            throw DataError(std::string("split_atoms: label '") + to_string(label) +
                            "' does not belong to axis " + to_string(axis));
        Atom atom = field.atoms[i];
        if (axis == ConeAxis::hopf) atom.hopf_label = label;
        else atom.neveu_label = label;

        MaxStableField* target = nullptr;
        if (label == first) target = &dec.part1;
        else if (label == second) target = &dec.part2;
        else if (policy == UnassignedPolicy::assign_to_part1) target = &dec.part1;
        else if (policy == UnassignedPolicy::assign_to_part2) target = &dec.part2;

        if (target == nullptr) {
            dec.unassigned.push_back(std::move(atom));
            continue;
        }
        max_atom_into(target->values, atom);
        target->atoms.push_back(std::move(atom));
        target->truncation.n_used += 1;
    }
    return dec;
}

M3Extraction extract_m3(const MaxStableField& field, double boundary_margin_frac) {
    const Grid& g = field.grid;
    const double margin = boundary_margin_frac * g.covered_radius();
    M3Extraction out;
    out.atoms.reserve(field.atoms.size());

    for (const auto& atom : field.atoms) {
        // lexicographically smallest argmax over grid indices
        double best = -1.0;
        std::array<long, 2> arg{0, 0};
        if (g.dim == 1) {
            for (long i = g.lo[0]; i <= g.hi[0]; ++i) {
                const double v = atom.path.values[g.flat(i)];
                if (v > best) { best = v; arg = {i, 0}; }
            }
        } else {
            for (long i = g.lo[0]; i <= g.hi[0]; ++i)
                for (long j = g.lo[1]; j <= g.hi[1]; ++j) {
                    const double v = atom.path.values[g.flat(i, j)];
                    if (v > best) { best = v; arg = {i, j}; }
                }
        }
        if (!(best > 0.0)) { ++out.boundary_excluded; continue; }

        bool near_edge = std::abs(g.coord(arg[0]) - g.coord(g.lo[0])) < margin ||
                         std::abs(g.coord(g.hi[0]) - g.coord(arg[0])) < margin;
        if (g.dim == 2)
            near_edge = near_edge ||
                        std::abs(g.coord(arg[1]) - g.coord(g.lo[1])) < margin ||
                        std::abs(g.coord(g.hi[1]) - g.coord(arg[1])) < margin;
        if (near_edge) { ++out.boundary_excluded; continue; }

        M3Atom m3;
        m3.x = arg;
        m3.v = atom.u * best;
        m3.z.grid = g;
        m3.z.grid.lo[0] = g.lo[0] - arg[0];
        m3.z.grid.hi[0] = g.hi[0] - arg[0];
        if (g.dim == 2) {
            m3.z.grid.lo[1] = g.lo[1] - arg[1];
            m3.z.grid.hi[1] = g.hi[1] - arg[1];
        }
        m3.z.values.resize(atom.path.values.size());
        for (std::size_t f = 0; f < atom.path.values.size(); ++f)
            m3.z.values[f] = atom.path.values[f] / best;
        out.atoms.push_back(std::move(m3));
    }
    return out;
}

IndependenceReport independence_check(const std::vector<double>& part1_at_origin,
                                      const std::vector<double>& part2_at_origin,
                                      std::size_t n_levels) {
    if (part1_at_origin.size() != part2_at_origin.size() || part1_at_origin.empty())
        throw DataError("independence_check: need matched, non-empty samples");
    const std::size_t n = part1_at_origin.size();

    auto quantile_levels = [&](const std::vector<double>& xs) {
        std::vector<double> sorted = xs;
        std::sort(sorted.begin(), sorted.end());
        std::vector<double> levels;
        for (std::size_t k = 1; k <= n_levels; ++k) {
            const double q = static_cast<double>(k) / static_cast<double>(n_levels + 1);
            levels.push_back(sorted[static_cast<std::size_t>(q * static_cast<double>(n - 1))]);
        }
        levels.push_back(std::numeric_limits<double>::infinity());
        return levels;
    };

    IndependenceReport rep;
    rep.n_reps = n;
    rep.levels1 = quantile_levels(part1_at_origin);
    rep.levels2 = quantile_levels(part2_at_origin);

    for (double a : rep.levels1) {
        for (double b : rep.levels2) {
            std::size_t joint = 0, only1 = 0, only2 = 0;
            for (std::size_t i = 0; i < n; ++i) {
                const bool in1 = part1_at_origin[i] <= a;
                const bool in2 = part2_at_origin[i] <= b;
                joint += in1 && in2;
                only1 += in1;
                only2 += in2;
            }
            const double p_joint = static_cast<double>(joint) / static_cast<double>(n);
            const double p_prod = (static_cast<double>(only1) / static_cast<double>(n)) *
                                  (static_cast<double>(only2) / static_cast<double>(n));
            rep.max_deviation = std::max(rep.max_deviation, std::abs(p_joint - p_prod));
        }
    }
    return rep;
}

} // namespace maxstab
