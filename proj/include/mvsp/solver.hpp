#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <string_view>
#include <vector>

#include "mvsp/formulation.hpp"
#include "mvsp/instance.hpp"

namespace mvsp {

struct SolveBudget {
    std::uint64_t max_nodes = 10'000'000;
    double wall_time_limit = std::numeric_limits<double>::infinity();  // seconds
    double optimality_gap_target = 0.0;                                // relative

    /// Throws ConfigError unless at least one limit is finite and the gap is non-negative.
    void validate() const;
};

enum class SolveStatus { optimal, feasible, infeasible, budget_exhausted };

std::string_view to_string(SolveStatus status);
SolveStatus status_from_string(std::string_view name);

struct SolveResult {
    std::optional<Solution> solution;
    SolveStatus status = SolveStatus::infeasible;
    double best_objective = std::numeric_limits<double>::infinity();
    double lower_bound = -std::numeric_limits<double>::infinity();
    std::uint64_t nodes_explored = 0;
    double elapsed_seconds = 0.0;
};

/// Incumbent comparisons treat objectives closer than this as equal.
inline constexpr double kObjectiveTolerance = 1e-9;

/// Componentwise-minimal replica counts for the assignment in `x`:
/// ceil(load / Load) where load > 0, else max over i of x (at least one instance per used variant).
std::vector<int> derive_replicas(const Instance& instance, const Solution& x);

/// Replaces solution.n with derive_replicas and refreshes the cost cache.
void apply_derived_replicas(const Instance& instance, Solution& solution);

struct ExactOptions {
    /// Seed the incumbent with solve_heuristic before branching.
    bool heuristic_start = true;
    /// Additional starting points; each is re-derived (n) and kept only if feasible.
    std::vector<Solution> warm_starts;
};

/// Depth-first branch-and-bound over the (e, v) choice of every demanded (i, m) pair,
/// with replica counts derived from the assignment.
SolveResult solve_exact(const Instance& instance, const SolveBudget& budget, const ExactOptions& options = {});

struct HeuristicOptions {
    std::uint64_t restart_seed = 0x5eed;
    std::uint64_t max_passes = 1000;  // local-search improvement passes
};

/// Greedy construction in descending-rate order, then move/swap local search.
/// Status is feasible or infeasible, never optimal.
SolveResult solve_heuristic(const Instance& instance, const HeuristicOptions& options = {});

/// Admissible lower bound on the objective of every feasible completion of the partial
/// assignment `partial` (pairs with no x set are free). Exposed for testing.
double completion_bound(const Instance& instance, const Solution& partial);

/// Every demanded (i, m) pair in branching order: descending rate, then (i, m).
struct DemandPair {
    std::size_t iot;
    std::size_t model;
    double rate;
};
std::vector<DemandPair> branching_order(const Instance& instance);

}  // namespace mvsp
