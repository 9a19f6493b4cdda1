#pragma once

#include "mvsp/instance.hpp"
#include "mvsp/solver.hpp"

namespace mvsp {

inline constexpr double kOracleGuard = 1e7;
inline constexpr double kParanoidGuard = 1e5;

/// Number of assignments the oracle enumerates: product over demanded pairs of the
/// reachable (edge, variant) options.
double assignment_space_size(const Instance& instance);

/// Enumerates every assignment, derives n, filters by check_feasibility and keeps the
/// minimum objective (first found on ties). `nodes_explored` is the number of
/// assignments enumerated. Throws SearchSpaceError above `guard`.
SolveResult brute_force(const Instance& instance, double guard = kOracleGuard);

/// Number of (x, n) points the paranoid oracle enumerates.
double paranoid_space_size(const Instance& instance);

/// Like brute_force but also enumerates every n between the derived minimum and K for
/// each assignment, so it optimizes over the full problem without the minimal-n shortcut.
SolveResult brute_force_paranoid(const Instance& instance, double guard = kParanoidGuard);

}  // namespace mvsp
