#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "maxstab/cones.hpp"
#include "maxstab/simulate.hpp"

namespace maxstab {

enum class UnassignedPolicy { strict, assign_to_part1, assign_to_part2 };

const char* to_string(UnassignedPolicy policy);

/// Cone split of a field's atoms. part1 holds the first-listed cone of the
/// axis (conservative / positive), part2 its complement; atoms the window
/// could not decide stay in `unassigned` under the strict policy so the
/// reconstruction identity
///   part1 v part2 v (unassigned contribution) == field
/// holds exactly at every grid point.
struct Decomposition {
    MaxStableField part1;
    MaxStableField part2;
    std::vector<Atom> unassigned;
    ConeAxis axis = ConeAxis::hopf;
    UnassignedPolicy policy = UnassignedPolicy::strict;

    std::vector<double> unassigned_values() const;
};

/// Routes atoms by the label on the requested axis. Labels must cover every
/// atom (DataError otherwise); requires a complete atom log.
Decomposition split_atoms(const MaxStableField& field, ConeAxis axis,
                          std::span<const ConeLabel> labels,
                          UnassignedPolicy policy = UnassignedPolicy::strict);

/// Moving-maximum atom: translation X (grid indices), level V, and the
/// recentered shape Z with Z(0) = 1 = max Z.
struct M3Atom {
    std::array<long, 2> x{0, 0};
    double v = 0.0;
    SpectralPath z;
};

struct M3Extraction {
    std::vector<M3Atom> atoms;
    std::size_t boundary_excluded = 0;  // argmax within the margin of the edge
};

/// Recenters each atom at its path argmax (lexicographically smallest index
/// on ties): X = argmax Y, V = U * max Y, Z = Y(X + .)/max Y. Atoms whose
/// argmax falls within `boundary_margin_frac` of the window edge are counted
/// and skipped, not silently recentred.
M3Extraction extract_m3(const MaxStableField& field, double boundary_margin_frac = 0.1);

/// Empirical independence of the two parts at the origin: compares the joint
/// ECDF of (part1(0), part2(0)) with the product of the margins on a grid of
/// empirical quantile levels; returns the largest absolute deviation.
struct IndependenceReport {
    double max_deviation = 0.0;
    std::size_t n_reps = 0;
    std::vector<double> levels1;
    std::vector<double> levels2;
};

IndependenceReport independence_check(const std::vector<double>& part1_at_origin,
                                      const std::vector<double>& part2_at_origin,
                                      std::size_t n_levels = 3);

} // namespace maxstab
