#include <doctest.h>

#include <cmath>
#include <functional>
#include <random>

#include "mvsp/errors.hpp"
#include "mvsp/generator.hpp"
#include "mvsp/oracle.hpp"
#include "mvsp/solver.hpp"
#include "support.hpp"

using namespace mvsp;
using mvsp::testing::kSmallLoad;
using mvsp::testing::single_link_instance;
using mvsp::testing::tiny_instance;

namespace {

SolveBudget nodes(std::uint64_t n) {
    SolveBudget b;
    b.max_nodes = n;
    return b;
}

// Calls visit on every full assignment (n derived) of the instance's demanded pairs.
void for_each_full(const Instance& inst, const std::function<void(const Solution&)>& visit) {
    const auto order = branching_order(inst);
    Solution s(inst);
    std::function<void(std::size_t)> rec = [&](std::size_t k) {
        if (k == order.size()) {
            Solution full = s;
            apply_derived_replicas(inst, full);
            visit(full);
            return;
        }
        const auto [i, m, rate] = order[k];
        for (std::size_t e = 0; e < inst.num_edge(); ++e) {
            if (!inst.reachable(i, e)) continue;
            for (std::size_t v = 0; v < inst.num_variants(m); ++v) {
                const std::size_t f = inst.flat_variant(m, v);
                s.set_x(i, e, f, true);
                rec(k + 1);
                s.set_x(i, e, f, false);
            }
        }
    };
    rec(0);
}

}  // namespace

TEST_CASE("seed-7 tiny instance matches the oracle exactly") {
    const Instance inst = random_instance({2, 2, 1, 2}, 7, kSmallLoad);
    const auto exact = solve_exact(inst, nodes(1'000'000));
    const auto oracle = brute_force(inst);
    REQUIRE(exact.solution.has_value());
    REQUIRE(oracle.solution.has_value());
    CHECK(exact.status == SolveStatus::optimal);
    CHECK(std::fabs(exact.best_objective - oracle.best_objective) <= 1e-9);
    CHECK(check_feasibility(inst, *exact.solution).feasible());
    CHECK(exact.lower_bound == exact.best_objective);
}

TEST_CASE("exact matches the oracle on tiny instances without a heuristic start") {
    ExactOptions options;
    options.heuristic_start = false;
    for (std::uint64_t seed = 100; seed < 120; ++seed) {
        const Instance inst = tiny_instance(seed);
        const auto exact = solve_exact(inst, nodes(1'000'000), options);
        const auto oracle = brute_force(inst);
        CHECK(exact.status == oracle.status);
        if (oracle.solution) CHECK(std::fabs(exact.best_objective - oracle.best_objective) <= 1e-9);
    }
}

TEST_CASE("zero-demand instance is solved by the empty placement") {
    const Instance base = tiny_instance(3);
    const Instance inst = Instance::build(base.topology(), base.catalog(), {}, base.params());
    const auto result = solve_exact(inst, nodes(10));
    CHECK(result.status == SolveStatus::optimal);
    REQUIRE(result.solution.has_value());
    CHECK(result.best_objective == 0.0);
    for (int n : result.solution->n_values()) CHECK(n == 0);
}

TEST_CASE("infeasible instance") {
    // One request stream of 10 against a variant serving 2, capped at one replica.
    Params p;
    p.max_replicas = 1;
    const Instance inst = single_link_instance({{10.0, 1.0, 2.0}}, 10.0, 11.0, 8.0, p);
    const auto exact = solve_exact(inst, nodes(100));
    CHECK(exact.status == SolveStatus::infeasible);
    CHECK_FALSE(exact.solution.has_value());
    CHECK(solve_heuristic(inst).status == SolveStatus::infeasible);
    CHECK(brute_force(inst).status == SolveStatus::infeasible);
}

TEST_CASE("node budget exhaustion keeps the incumbent") {
    const Instance inst = random_instance({10, 5, 3, 8}, 1);
    const auto result = solve_exact(inst, nodes(50));
    CHECK(result.status == SolveStatus::budget_exhausted);
    REQUIRE(result.solution.has_value());
    CHECK(check_feasibility(inst, *result.solution).feasible());
    CHECK(result.lower_bound <= result.best_objective);
    CHECK(result.nodes_explored <= 51);
}

TEST_CASE("wall-time limit stops the search") {
    SolveBudget budget;
    budget.max_nodes = std::numeric_limits<std::uint64_t>::max();
    budget.wall_time_limit = 0.05;
    const auto result = solve_exact(random_instance({10, 5, 3, 8}, 2), budget);
    CHECK(result.status == SolveStatus::budget_exhausted);
    CHECK(result.elapsed_seconds < 5.0);
}

TEST_CASE("budget validation") {
    SolveBudget b;
    b.max_nodes = std::numeric_limits<std::uint64_t>::max();
    CHECK_THROWS_AS(b.validate(), ConfigError);
    b.max_nodes = 10;
    b.optimality_gap_target = -0.1;
    CHECK_THROWS_AS(b.validate(), ConfigError);
    b.optimality_gap_target = 0.0;
    CHECK_NOTHROW(b.validate());
}

TEST_CASE("solve status names") {
    for (auto s : {SolveStatus::optimal, SolveStatus::feasible, SolveStatus::infeasible, SolveStatus::budget_exhausted})
        CHECK(status_from_string(to_string(s)) == s);
    CHECK(to_string(SolveStatus::budget_exhausted) == "budget_exhausted");
    CHECK_THROWS_AS(status_from_string("done"), ParseError);
}

TEST_CASE("exact solve is deterministic") {
    const Instance inst = random_instance({4, 3, 2, 3}, 11, kSmallLoad);
    const auto a = solve_exact(inst, nodes(20'000));
    const auto b = solve_exact(inst, nodes(20'000));
    REQUIRE(a.solution.has_value());
    REQUIRE(b.solution.has_value());
    CHECK(a.solution->same_placement(*b.solution));
    CHECK(a.nodes_explored == b.nodes_explored);
    CHECK(a.best_objective == b.best_objective);
}

TEST_CASE("gap target allows early optimal status") {
    const Instance inst = random_instance({4, 3, 2, 3}, 12, kSmallLoad);
    SolveBudget b = nodes(1'000'000);
    b.optimality_gap_target = 0.5;
    const auto loose = solve_exact(inst, b);
    const auto tight = solve_exact(inst, nodes(1'000'000));
    REQUIRE(loose.solution.has_value());
    CHECK(loose.nodes_explored <= tight.nodes_explored);
    if (loose.status == SolveStatus::optimal)
        CHECK(loose.best_objective - loose.lower_bound <= 0.5 * std::fabs(loose.best_objective) + 1e-9);
}

TEST_CASE("warm starts") {
    const Instance inst = random_instance({4, 3, 2, 3}, 13, kSmallLoad);
    const auto reference = solve_exact(inst, nodes(1'000'000));
    REQUIRE(reference.solution.has_value());

    ExactOptions options;
    options.heuristic_start = false;
    options.warm_starts.push_back(*reference.solution);
    options.warm_starts.push_back(Solution(inst));  // infeasible, ignored
    const auto warm = solve_exact(inst, nodes(1), options);
    REQUIRE(warm.solution.has_value());
    CHECK(warm.best_objective <= reference.best_objective + 1e-9);

    ExactOptions mismatched;
    mismatched.warm_starts.push_back(Solution(tiny_instance(1)));
    CHECK_NOTHROW(solve_exact(inst, nodes(10), mismatched));
}

TEST_CASE("heuristic never beats the optimum and is usually close") {
    int within = 0, total = 0;
    for (std::uint64_t seed = 1; seed <= 50; ++seed) {
        const Instance inst = tiny_instance(seed);
        const auto oracle = brute_force(inst);
        const auto heur = solve_heuristic(inst);
        CHECK(heur.status != SolveStatus::optimal);
        if (!oracle.solution) {
            CHECK_FALSE(heur.solution.has_value());
            continue;
        }
        ++total;
        if (!heur.solution) continue;
        CHECK(check_feasibility(inst, *heur.solution).feasible());
        CHECK(heur.best_objective >= oracle.best_objective - 1e-9);
        if (heur.best_objective <= 1.1 * oracle.best_objective + 1e-12) ++within;
    }
    REQUIRE(total > 0);
    CHECK(within >= 0.9 * total);
}

TEST_CASE("derive_replicas") {
    const Instance inst = single_link_instance({{10.0, 1.0, 2.0}, {20.0, 2.0, 8.0}}, 5.0);
    Solution s(inst);
    CHECK(derive_replicas(inst, s) == std::vector<int>{0, 0});
    s.set_x(0, 0, 0, true);
    CHECK(derive_replicas(inst, s) == std::vector<int>{3, 0});
    s.set_x(0, 0, 0, false);
    s.set_x(0, 0, 1, true);
    CHECK(derive_replicas(inst, s) == std::vector<int>{0, 1});
}

TEST_CASE("property: minimal replica counts are objective-optimal") {
    std::mt19937_64 rng(31);
    int checked = 0;
    for (std::uint64_t seed = 1; checked < 200; ++seed) {
        const Instance inst = random_instance({3, 3, 2, 3}, seed, kSmallLoad);
        for (int k = 0; k < 20 && checked < 200; ++k) {
            auto s = mvsp::testing::random_feasible(inst, rng, 200);
            if (!s) break;
            ++checked;
            const double base = objective(inst, *s);
            for (std::size_t c = 0; c < s->n_values().size(); ++c) {
                Solution more = *s;
                ++more.n_values()[c];
                CHECK(objective(inst, more) >= base - 1e-12);
            }
        }
    }
}

TEST_CASE("property: completion bound is admissible") {
    for (std::uint64_t seed = 1; seed <= 12; ++seed) {
        const Instance inst = tiny_instance(seed);
        const auto order = branching_order(inst);
        for_each_full(inst, [&](const Solution& full) {
            if (!check_feasibility(inst, full).feasible()) return;
            const double value = objective(inst, full);
            for (std::size_t p = 0; p <= order.size(); ++p) {
                Solution partial(inst);
                for (std::size_t k = 0; k < p; ++k) {
                    const auto [i, m, rate] = order[k];
                    for (std::size_t e = 0; e < inst.num_edge(); ++e)
                        for (std::size_t v = 0; v < inst.num_variants(m); ++v) {
                            const std::size_t f = inst.flat_variant(m, v);
                            partial.set_x(i, e, f, full.x(i, e, f));
                        }
                }
                CHECK(completion_bound(inst, partial) <= value + 1e-9);
            }
        });
    }
}

TEST_CASE("branching order is by descending rate then index") {
    const Instance inst = random_instance({4, 3, 2, 3}, 5, kSmallLoad);
    const auto order = branching_order(inst);
    for (std::size_t k = 1; k < order.size(); ++k) {
        const auto& a = order[k - 1];
        const auto& b = order[k];
        const bool ok = a.rate > b.rate || (a.rate == b.rate && std::pair(a.iot, a.model) < std::pair(b.iot, b.model));
        CHECK(ok);
    }
}

TEST_CASE("raising the co-location cap never hurts") {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const Instance inst = tiny_instance(seed, 3.0);
        Params p1 = inst.params(), p2 = inst.params();
        p1.max_replicas = 1;
        p2.max_replicas = 2;
        const auto k1 = brute_force(inst.with_params(p1));
        const auto k2 = brute_force(inst.with_params(p2));
        if (k1.solution) {
            REQUIRE(k2.solution.has_value());
            CHECK(k2.best_objective <= k1.best_objective + 1e-12);
        }
    }
}
