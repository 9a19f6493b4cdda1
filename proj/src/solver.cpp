#include "mvsp/solver.hpp"

#include <algorithm>
#include <chrono>
#include <numeric>
#include <random>

#include "mvsp/errors.hpp"
#include "search_state.hpp"

namespace mvsp {

namespace {

using detail::SearchState;
using Clock = std::chrono::steady_clock;

constexpr std::string_view kStatusNames[] = {"optimal", "feasible", "infeasible", "budget_exhausted"};
constexpr double kInf = std::numeric_limits<double>::infinity();

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Evaluated {
    Solution solution;
    double objective;
};

// Re-derives n for the assignment in `candidate` and keeps it only if fully feasible.
std::optional<Evaluated> evaluate_candidate(const Instance& instance, const Solution& candidate) {
    if (!candidate.matches(instance)) return std::nullopt;
    Solution solution = candidate;
    apply_derived_replicas(instance, solution);
    if (!check_feasibility(instance, solution).feasible()) return std::nullopt;
    const double value = objective(instance, solution);
    return Evaluated{std::move(solution), value};
}

// Greedy: each pair, in the given order, takes its feasible option with the lowest
// resulting objective; ties keep the lexicographically first (edge, variant).
bool greedy(SearchState& state, const std::vector<std::size_t>& order) {
    state.clear();
    for (std::size_t p : order) {
        const auto& pair = state.pairs()[p];
        int best = -1;
        double best_value = kInf;
        for (std::size_t o = 0; o < pair.options.size(); ++o) {
            if (!state.can_assign(p, o)) continue;
            state.assign(p, o);
            const double value = state.objective();
            state.unassign(p);
            if (value < best_value - kObjectiveTolerance) {
                best_value = value;
                best = static_cast<int>(o);
            }
        }
        if (best < 0) return false;
        state.assign(p, static_cast<std::size_t>(best));
    }
    return true;
}

// Best-improvement local search over single reassignments, then pairwise swaps.
std::uint64_t local_search(SearchState& state, std::uint64_t max_passes) {
    const std::size_t P = state.num_pairs();
    std::uint64_t passes = 0;
    while (passes < max_passes) {
        ++passes;
        double current = state.objective();

        struct Move {
            std::size_t p, q;
            int op, oq;
        };
        std::optional<Move> best;
        double best_value = current - kObjectiveTolerance;

        for (std::size_t p = 0; p < P; ++p) {
            const int cur = state.assigned(p);
            state.unassign(p);
            for (std::size_t o = 0; o < state.pairs()[p].options.size(); ++o) {
                if (static_cast<int>(o) == cur || !state.can_assign(p, o)) continue;
                state.assign(p, o);
                const double value = state.objective();
                state.unassign(p);
                if (value < best_value) {
                    best_value = value;
                    best = Move{p, p, static_cast<int>(o), -1};
                }
            }
            state.assign(p, static_cast<std::size_t>(cur));
        }

        if (!best) {
            for (std::size_t p = 0; p < P; ++p) {
                for (std::size_t q = p + 1; q < P; ++q) {
                    const auto& pp = state.pairs()[p];
                    const auto& pq = state.pairs()[q];
                    const int cp = state.assigned(p);
                    const int cq = state.assigned(q);
                    const auto& op_cur = pp.options[static_cast<std::size_t>(cp)];
                    const auto& oq_cur = pq.options[static_cast<std::size_t>(cq)];
                    int np, nq;
                    if (pp.model == pq.model) {
                        if (op_cur.flat == oq_cur.flat && op_cur.edge == oq_cur.edge) continue;
                        np = state.option_index(p, oq_cur.edge, oq_cur.flat);
                        nq = state.option_index(q, op_cur.edge, op_cur.flat);
                    } else {
                        if (op_cur.edge == oq_cur.edge) continue;
                        np = state.option_index(p, oq_cur.edge, op_cur.flat);
                        nq = state.option_index(q, op_cur.edge, oq_cur.flat);
                    }
                    if (np < 0 || nq < 0) continue;
                    state.unassign(p);
                    state.unassign(q);
                    if (state.can_assign(p, static_cast<std::size_t>(np))) {
                        state.assign(p, static_cast<std::size_t>(np));
                        if (state.can_assign(q, static_cast<std::size_t>(nq))) {
                            state.assign(q, static_cast<std::size_t>(nq));
                            const double value = state.objective();
                            if (value < best_value) {
                                best_value = value;
                                best = Move{p, q, np, nq};
                            }
                            state.unassign(q);
                        }
                        state.unassign(p);
                    }
                    state.assign(p, static_cast<std::size_t>(cp));
                    state.assign(q, static_cast<std::size_t>(cq));
                }
            }
        }

        if (!best) break;
        state.unassign(best->p);
        if (best->q != best->p) {
            state.unassign(best->q);
            state.assign(best->p, static_cast<std::size_t>(best->op));
            state.assign(best->q, static_cast<std::size_t>(best->oq));
        } else {
            state.assign(best->p, static_cast<std::size_t>(best->op));
        }
    }
    return passes;
}

class BranchAndBound {
public:
    BranchAndBound(const Instance& instance, const SolveBudget& budget)
        : instance_(instance), budget_(budget), state_(instance), start_(Clock::now()) {}

    void offer(const Evaluated& candidate) {
        if (candidate.objective < best_ - kObjectiveTolerance) {
            best_ = candidate.objective;
            incumbent_ = candidate.solution;
        }
    }

    SolveResult run() {
        root_bound_ = state_.bound();
        search(0);
        SolveResult result;
        result.nodes_explored = nodes_;
        result.elapsed_seconds = seconds_since(start_);
        if (incumbent_) {
            result.solution = incumbent_;
            result.best_objective = best_;
        }
        if (stopped_) {
            result.status = SolveStatus::budget_exhausted;
            result.lower_bound = std::min(root_bound_, best_);
        } else if (incumbent_) {
            result.status = SolveStatus::optimal;
            result.lower_bound = std::min(best_, gap_pruned_bound_);
        } else {
            result.status = SolveStatus::infeasible;
            result.lower_bound = kInf;
        }
        return result;
    }

private:
    bool out_of_budget() {
        if (nodes_ >= budget_.max_nodes) return true;
        if ((nodes_ & 1023) == 0 && seconds_since(start_) > budget_.wall_time_limit) return true;
        return false;
    }

    void search(std::size_t depth) {
        if (stopped_) return;
        if (out_of_budget()) {
            stopped_ = true;
            return;
        }
        ++nodes_;

        if (depth == state_.num_pairs()) {
            if (state_.objective() >= best_ - kObjectiveTolerance) return;
            Solution solution = state_.to_solution();
            if (!check_feasibility(instance_, solution).feasible()) return;
            offer({solution, objective(instance_, solution)});
            return;
        }

        const double bound = state_.bound();
        if (bound >= best_ - kObjectiveTolerance) return;
        if (best_ < kInf && bound >= best_ - budget_.optimality_gap_target * std::abs(best_)) {
            gap_pruned_bound_ = std::min(gap_pruned_bound_, bound);
            return;
        }

        const auto& pair = state_.pairs()[depth];
        std::vector<std::pair<double, std::size_t>> children;
        children.reserve(pair.options.size());
        for (std::size_t o = 0; o < pair.options.size(); ++o) {
            if (!state_.can_assign(depth, o)) continue;
            state_.assign(depth, o);
            children.emplace_back(state_.objective(), o);
            state_.unassign(depth);
        }
        std::stable_sort(children.begin(), children.end(),
                         [](const auto& a, const auto& b) { return a.first < b.first; });
        for (const auto& [value, o] : children) {
            state_.assign(depth, o);
            search(depth + 1);
            state_.unassign(depth);
            if (stopped_) return;
        }
    }

    const Instance& instance_;
    SolveBudget budget_;
    SearchState state_;
    Clock::time_point start_;
    std::optional<Solution> incumbent_;
    double best_ = kInf;
    double root_bound_ = -kInf;
    double gap_pruned_bound_ = kInf;
    std::uint64_t nodes_ = 0;
    bool stopped_ = false;
};

}  // namespace

void SolveBudget::validate() const {
    if (max_nodes == std::numeric_limits<std::uint64_t>::max() && !(wall_time_limit < kInf))
        throw ConfigError("solve budget needs a finite node or time limit");
    if (!(optimality_gap_target >= 0.0)) throw ConfigError("optimality gap target must be non-negative");
}

std::string_view to_string(SolveStatus status) { return kStatusNames[static_cast<std::size_t>(status)]; }

SolveStatus status_from_string(std::string_view name) {
    for (std::size_t k = 0; k < std::size(kStatusNames); ++k)
        if (kStatusNames[k] == name) return static_cast<SolveStatus>(k);
    throw ParseError("unknown solve status '" + std::string(name) + "'");
}

std::vector<DemandPair> branching_order(const Instance& instance) {
    std::vector<DemandPair> pairs;
    for (std::size_t i = 0; i < instance.num_iot(); ++i)
        for (std::size_t m = 0; m < instance.num_models(); ++m)
            if (instance.demanded(i, m)) pairs.push_back({i, m, instance.rate(i, m)});
    std::stable_sort(pairs.begin(), pairs.end(), [](const auto& a, const auto& b) { return a.rate > b.rate; });
    return pairs;
}

std::vector<int> derive_replicas(const Instance& instance, const Solution& x) {
    const std::size_t V = instance.total_variants();
    std::vector<int> n(instance.num_edge() * V, 0);
    for (std::size_t e = 0; e < instance.num_edge(); ++e) {
        for (std::size_t f = 0; f < V; ++f) {
            const std::size_t m = instance.model_of(f);
            double load = 0.0;
            int any = 0;
            for (std::size_t i = 0; i < instance.num_iot(); ++i) {
                if (!x.x(i, e, f)) continue;
                any = 1;
                load += instance.rate(i, m);
            }
            n[e * V + f] = load > 0.0 ? detail::replicas_for(load, instance.max_load(f)) : any;
        }
    }
    return n;
}

void apply_derived_replicas(const Instance& instance, Solution& solution) {
    solution.n_values() = derive_replicas(instance, solution);
    fill_costs(instance, solution);
}

SolveResult solve_heuristic(const Instance& instance, const HeuristicOptions& options) {
    const auto start = Clock::now();
    SearchState state(instance);
    std::vector<std::size_t> order(state.num_pairs());
    std::iota(order.begin(), order.end(), 0);

    SolveResult result;
    bool built = greedy(state, order);
    if (!built) {
        std::mt19937_64 rng(options.restart_seed);
        for (std::size_t k = order.size(); k > 1; --k) std::swap(order[k - 1], order[rng() % k]);
        built = greedy(state, order);
    }
    if (!built) {
        result.status = SolveStatus::infeasible;
        result.elapsed_seconds = seconds_since(start);
        return result;
    }
    result.nodes_explored = local_search(state, options.max_passes);

    Solution solution = state.to_solution();
    if (!check_feasibility(instance, solution).feasible()) {
        result.status = SolveStatus::infeasible;
    } else {
        result.status = SolveStatus::feasible;
        result.best_objective = objective(instance, solution);
        result.solution = std::move(solution);
    }
    result.elapsed_seconds = seconds_since(start);
    return result;
}

SolveResult solve_exact(const Instance& instance, const SolveBudget& budget, const ExactOptions& options) {
    budget.validate();
    const auto start = Clock::now();
    BranchAndBound search(instance, budget);
    if (options.heuristic_start) {
        auto start_result = solve_heuristic(instance);
        if (start_result.solution) search.offer({*start_result.solution, start_result.best_objective});
    }
    for (const auto& candidate : options.warm_starts)
        if (auto evaluated = evaluate_candidate(instance, candidate)) search.offer(*evaluated);
    SolveResult result = search.run();
    result.elapsed_seconds = seconds_since(start);
    return result;
}

double completion_bound(const Instance& instance, const Solution& partial) {
    SearchState state(instance);
    for (std::size_t p = 0; p < state.num_pairs(); ++p) {
        const auto& pair = state.pairs()[p];
        for (std::size_t o = 0; o < pair.options.size(); ++o) {
            if (!partial.x(pair.iot, pair.options[o].edge, pair.options[o].flat)) continue;
            if (!state.can_assign(p, o)) return kInf;
            state.assign(p, o);
            break;
        }
    }
    return state.bound();
}

}  // namespace mvsp
