#pragma once

#include <cmath>
#include <cstddef>
#include <set>
#include <vector>

#include "mvsp/formulation.hpp"
#include "mvsp/instance.hpp"
#include "mvsp/solver.hpp"

namespace mvsp::detail {

/// Smallest replica count serving `load` with per-instance capacity `max_load`.
inline int replicas_for(double load, double max_load) {
    if (load <= 0.0) return 0;
    return std::max(1, static_cast<int>(std::ceil(load / max_load - 1e-9)));
}

/// Incremental evaluation of a (partial) assignment with derived replica counts.
///
/// With every used variant deployed, IL of variant f on node e reduces to
/// L_f (1 - a_f) + S_e where S_e = sum_g a_g L_g n_g, so the latency numerator is
/// sum r CL + sum_e (A_e + W_e S_e) with A_e = sum_f W_f L_f (1 - a_f) and W the routed rate.
class SearchState {
public:
    struct Option {
        std::size_t edge;
        std::size_t flat;
        double cl;
        double fixed;         // CL + L (1 - a)
        double interference;  // a L, added to S_e per instance
        double slack;         // latency_req - fixed, plus tolerance
    };

    struct Pair {
        std::size_t iot;
        std::size_t model;
        double rate;
        std::vector<Option> options;             // lexicographic (edge, variant)
        std::vector<int> option_at;              // edge * V_m + v -> option index or -1
    };

    explicit SearchState(const Instance& instance);

    const Instance& instance() const noexcept { return instance_; }
    const std::vector<Pair>& pairs() const noexcept { return pairs_; }
    std::size_t num_pairs() const noexcept { return pairs_.size(); }
    int assigned(std::size_t p) const { return choice_[p]; }
    std::size_t num_assigned() const noexcept { return num_assigned_; }

    /// True when assigning the (currently unassigned) pair keeps the state feasible.
    bool can_assign(std::size_t p, std::size_t o) const;
    void assign(std::size_t p, std::size_t o);
    void unassign(std::size_t p);

    double objective() const;
    /// Admissible bound over every feasible completion; +inf if some free pair has no
    /// feasible option left.
    double bound() const;

    /// Index of the option of pair p at (edge, flat variant), or -1.
    int option_index(std::size_t p, std::size_t edge, std::size_t flat) const;

    Solution to_solution() const;
    void load(const Solution& solution);  // assigns every pair set in the solution's x
    void clear();

private:
    struct Change {
        int old_n;
        int new_n;
    };
    Change change_for(std::size_t edge, std::size_t flat, double delta_load) const;
    double node_cost(std::size_t edge, double memory) const;
    bool node_ok(std::size_t edge, double memory, double interference, int instances, double extra_slack) const;

    const Instance& instance_;
    std::vector<Pair> pairs_;
    std::vector<int> choice_;
    std::size_t num_assigned_ = 0;

    std::vector<double> load_;  // (e, f)
    std::vector<int> n_;        // (e, f)
    std::vector<double> memory_, interference_, weighted_, routed_;  // per e: mem, S, A, W
    std::vector<int> instances_;
    std::vector<std::multiset<double>> slack_;
    double comm_ = 0.0;
};

}  // namespace mvsp::detail
