#include "mvsp/oracle.hpp"

#include <chrono>
#include <functional>

#include "mvsp/errors.hpp"
#include "mvsp/formulation.hpp"

namespace mvsp {

namespace {

struct Choice {
    std::size_t edge;
    std::size_t flat;
};

struct Slot {
    std::size_t iot;
    std::vector<Choice> choices;
};

std::vector<Slot> enumerate_slots(const Instance& instance) {
    std::vector<Slot> slots;
    for (std::size_t i = 0; i < instance.num_iot(); ++i) {
        for (std::size_t m = 0; m < instance.num_models(); ++m) {
            if (!instance.demanded(i, m)) continue;
            Slot slot{i, {}};
            for (std::size_t e = 0; e < instance.num_edge(); ++e)
                if (instance.reachable(i, e))
                    for (std::size_t v = 0; v < instance.num_variants(m); ++v)
                        slot.choices.push_back({e, instance.flat_variant(m, v)});
            slots.push_back(std::move(slot));
        }
    }
    return slots;
}

// Calls visit(x) for every assignment, odometer order with the first slot fastest.
void for_each_assignment(const Instance& instance, const std::vector<Slot>& slots,
                         const std::function<void(const Solution&)>& visit) {
    for (const auto& slot : slots)
        if (slot.choices.empty()) return;
    Solution x(instance);
    std::vector<std::size_t> digit(slots.size(), 0);
    for (std::size_t s = 0; s < slots.size(); ++s)
        x.set_x(slots[s].iot, slots[s].choices[0].edge, slots[s].choices[0].flat, true);
    while (true) {
        visit(x);
        std::size_t s = 0;
        for (; s < slots.size(); ++s) {
            const auto& slot = slots[s];
            x.set_x(slot.iot, slot.choices[digit[s]].edge, slot.choices[digit[s]].flat, false);
            digit[s] = (digit[s] + 1) % slot.choices.size();
            x.set_x(slot.iot, slot.choices[digit[s]].edge, slot.choices[digit[s]].flat, true);
            if (digit[s] != 0) break;
        }
        if (s == slots.size()) return;
    }
}

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

void finish(SolveResult& result) {
    if (result.solution) {
        result.status = SolveStatus::optimal;
        result.lower_bound = result.best_objective;
    } else {
        result.status = SolveStatus::infeasible;
        result.lower_bound = std::numeric_limits<double>::infinity();
    }
}

}  // namespace

double assignment_space_size(const Instance& instance) {
    double size = 1.0;
    for (const auto& slot : enumerate_slots(instance)) size *= static_cast<double>(slot.choices.size());
    return size;
}

SolveResult brute_force(const Instance& instance, double guard) {
    const double size = assignment_space_size(instance);
    if (size > guard) throw SearchSpaceError(size, guard);
    const auto start = std::chrono::steady_clock::now();

    SolveResult result;
    for_each_assignment(instance, enumerate_slots(instance), [&](const Solution& x) {
        ++result.nodes_explored;
        Solution candidate = x;
        candidate.n_values() = derive_replicas(instance, candidate);
        if (!check_feasibility(instance, candidate).feasible()) return;
        const double value = objective(instance, candidate);
        if (value < result.best_objective) {
            result.best_objective = value;
            fill_costs(instance, candidate);
            result.solution = std::move(candidate);
        }
    });
    finish(result);
    result.elapsed_seconds = seconds_since(start);
    return result;
}

double paranoid_space_size(const Instance& instance) {
    const double K = instance.max_replicas();
    double total = 0.0;
    for_each_assignment(instance, enumerate_slots(instance), [&](const Solution& x) {
        double points = 1.0;
        for (int lo : derive_replicas(instance, x)) points *= lo > K ? 0.0 : K - lo + 1.0;
        total += points;
    });
    return total;
}

SolveResult brute_force_paranoid(const Instance& instance, double guard) {
    const double size = assignment_space_size(instance) > guard ? assignment_space_size(instance)
                                                                : paranoid_space_size(instance);
    if (size > guard) throw SearchSpaceError(size, guard);
    const auto start = std::chrono::steady_clock::now();
    const int K = instance.max_replicas();

    SolveResult result;
    for_each_assignment(instance, enumerate_slots(instance), [&](const Solution& x) {
        const std::vector<int> lo = derive_replicas(instance, x);
        for (int l : lo)
            if (l > K) return;
        Solution candidate = x;
        auto& n = candidate.n_values();
        n = lo;
        while (true) {
            ++result.nodes_explored;
            if (check_feasibility(instance, candidate).feasible()) {
                const double value = objective(instance, candidate);
                if (value < result.best_objective) {
                    result.best_objective = value;
                    Solution best = candidate;
                    fill_costs(instance, best);
                    result.solution = std::move(best);
                }
            }
            std::size_t k = 0;
            for (; k < n.size(); ++k) {
                if (n[k] < K) {
                    ++n[k];
                    break;
                }
                n[k] = lo[k];
            }
            if (k == n.size()) break;
        }
    });
    finish(result);
    result.elapsed_seconds = seconds_since(start);
    return result;
}

}  // namespace mvsp
