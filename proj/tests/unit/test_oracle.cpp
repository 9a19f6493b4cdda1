#include <doctest.h>

#include <algorithm>
#include <cmath>
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

// Tangent under-approximation of expm1(4u)/expm1(4) at the default eleven points.
double tangent_cost(double u) {
    const double d = std::expm1(4.0);
    double best = -1e300;
    for (int k = 0; k <= 10; ++k) {
        const double t = k / 10.0;
        best = std::max(best, std::expm1(4.0 * t) / d + 4.0 * std::exp(4.0 * t) / d * (u - t));
    }
    return best;
}

}  // namespace

TEST_CASE("singleton search space") {
    const Instance inst = single_link_instance({{10.0, 1.0, 8.0}}, 3.0);
    CHECK(assignment_space_size(inst) == 1.0);
    const auto result = brute_force(inst);
    REQUIRE(result.solution.has_value());
    CHECK(result.status == SolveStatus::optimal);
    CHECK(result.nodes_explored == 1);
    CHECK(result.solution->x(0, 0, 0) == 1);
    CHECK(result.solution->n(0, 0) == 1);
    const double expected = 0.1 * (22.0 + 10.0) + 0.9 * tangent_cost(1.0 / 8.0);
    CHECK(result.best_objective == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("seed-7 tiny instance: oracle and exact agree") {
    const Instance inst = random_instance({2, 2, 1, 2}, 7, kSmallLoad);
    CHECK(assignment_space_size(inst) == 16.0);
    const auto oracle = brute_force(inst);
    const auto exact = solve_exact(inst, SolveBudget{});
    REQUIRE(oracle.solution.has_value());
    CHECK(std::fabs(oracle.best_objective - exact.best_objective) <= 1e-9);
    CHECK(oracle.nodes_explored == 16);
}

TEST_CASE("guard") {
    const Instance p1 = random_instance({10, 5, 3, 8}, 1);
    CHECK(assignment_space_size(p1) == doctest::Approx(std::pow(40.0, 30)));
    CHECK_THROWS_AS(brute_force(p1), SearchSpaceError);
    CHECK_THROWS_AS(brute_force_paranoid(p1), SearchSpaceError);
    try {
        brute_force(tiny_instance(7), 1.0);
        FAIL("expected SearchSpaceError");
    } catch (const SearchSpaceError& e) {
        CHECK(e.size() > 1.0);
    }
}

TEST_CASE("cap K=2 never worse than K=1") {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const Instance inst = tiny_instance(seed, 3.0);
        Params p = inst.params();
        p.max_replicas = 1;
        const auto k1 = brute_force(inst.with_params(p));
        p.max_replicas = 2;
        const auto k2 = brute_force(inst.with_params(p));
        if (k1.solution) CHECK(k2.best_objective <= k1.best_objective);
    }
}

TEST_CASE("oracle is a lower bound on random feasible solutions") {
    std::mt19937_64 rng(41);
    std::uint64_t seed = 9;
    while (!brute_force(random_instance({3, 2, 2, 2}, seed, kSmallLoad)).solution) ++seed;
    const Instance inst = random_instance({3, 2, 2, 2}, seed, kSmallLoad);
    const auto oracle = brute_force(inst);
    for (int k = 0; k < 100; ++k) {
        auto s = mvsp::testing::random_feasible(inst, rng);
        REQUIRE(s.has_value());
        CHECK(oracle.best_objective <= objective(inst, *s) + 1e-12);
    }
}

TEST_CASE("paranoid enumeration never beats minimal replicas") {
    for (std::uint64_t seed = 1; seed <= 8; ++seed) {
        const Instance inst = tiny_instance(seed);
        if (paranoid_space_size(inst) > kParanoidGuard) continue;
        const auto minimal = brute_force(inst);
        const auto paranoid = brute_force_paranoid(inst);
        CHECK(paranoid.status == minimal.status);
        if (minimal.solution) CHECK(std::fabs(paranoid.best_objective - minimal.best_objective) <= 1e-9);
    }
}

TEST_CASE("empty demand: one empty assignment") {
    const Instance base = tiny_instance(2);
    const Instance inst = Instance::build(base.topology(), base.catalog(), {}, base.params());
    CHECK(assignment_space_size(inst) == 1.0);
    const auto result = brute_force(inst);
    CHECK(result.status == SolveStatus::optimal);
    CHECK(result.best_objective == 0.0);
}
