#include "mvsp/formulation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mvsp/errors.hpp"

namespace mvsp {

namespace {

constexpr std::string_view kConstraintNames[] = {
    "assignment", "latency_req", "load", "replica_link", "replica_cap", "memory", "utilization",
};

bool exceeds(double lhs, double rhs) {
    return lhs - rhs > kFeasibilityTolerance * std::max(1.0, std::abs(rhs));
}

Location at(std::size_t i, std::size_t e, std::size_t m, std::size_t v) {
    return {static_cast<int>(i), static_cast<int>(e), static_cast<int>(m), static_cast<int>(v)};
}

Location at(std::size_t e, std::size_t m, std::size_t v) {
    return {-1, static_cast<int>(e), static_cast<int>(m), static_cast<int>(v)};
}

}  // namespace

std::string_view to_string(ConstraintId id) {
    return kConstraintNames[static_cast<std::size_t>(id)];
}

ConstraintId constraint_from_string(std::string_view name) {
    for (std::size_t k = 0; k < std::size(kConstraintNames); ++k)
        if (kConstraintNames[k] == name) return static_cast<ConstraintId>(k);
    throw ParseError("unknown constraint id '" + std::string(name) + "'");
}

std::size_t FeasibilityReport::count(ConstraintId id) const {
    return static_cast<std::size_t>(std::count_if(violations.begin(), violations.end(),
                                                  [id](const Violation& v) { return v.constraint == id; }));
}

double inference_latency(const Instance& instance, const Solution& solution, std::size_t edge, std::size_t f) {
    const double own = instance.base_latency(edge, f);
    double latency = own + instance.interference(f) * own * std::max(solution.n(edge, f) - 1, 0);
    for (std::size_t g = 0; g < instance.total_variants(); ++g) {
        if (g == f) continue;
        latency += instance.interference(g) * instance.base_latency(edge, g) * solution.n(edge, g);
    }
    return latency;
}

double average_latency(const Instance& instance, const Solution& solution) {
    if (instance.total_rate() <= 0.0) return 0.0;
    double weighted = 0.0;
    for (std::size_t i = 0; i < instance.num_iot(); ++i) {
        for (std::size_t e = 0; e < instance.num_edge(); ++e) {
            for (std::size_t f = 0; f < instance.total_variants(); ++f) {
                if (!solution.x(i, e, f)) continue;
                const double rate = instance.rate(i, instance.model_of(f));
                if (rate == 0.0) continue;
                weighted += rate * (instance.comm_latency(i, e) + inference_latency(instance, solution, e, f));
            }
        }
    }
    return weighted / instance.total_rate();
}

double node_utilization(const Instance& instance, const Solution& solution, std::size_t edge) {
    double used = 0.0;
    for (std::size_t f = 0; f < instance.total_variants(); ++f)
        used += instance.memory_req(f) * solution.n(edge, f);
    return used / instance.capacity(edge);
}

double utilization_cost(const Instance& instance, double u) {
    const auto& tangents = instance.cost_tangents();
    if (tangents.empty()) throw ConfigError("utilization cost needs at least one tangent");
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& y : tangents) best = std::max(best, y(u));
    return best;
}

double average_cost(const Instance& instance, const Solution& solution) {
    double total = 0.0;
    for (std::size_t e = 0; e < instance.num_edge(); ++e)
        total += utilization_cost(instance, node_utilization(instance, solution, e));
    return total / static_cast<double>(instance.num_edge());
}

void fill_costs(const Instance& instance, Solution& solution) {
    for (std::size_t e = 0; e < instance.num_edge(); ++e)
        solution.z_[e] = utilization_cost(instance, node_utilization(instance, solution, e));
    solution.evaluated_ = true;
}

double average_cost(const Instance& instance, Solution& solution) {
    fill_costs(instance, solution);
    double total = 0.0;
    for (double z : solution.z_values()) total += z;
    return total / static_cast<double>(instance.num_edge());
}

double objective(const Instance& instance, const Solution& solution) {
    const double alpha = instance.objective_weight();
    return alpha * average_latency(instance, solution) + (1.0 - alpha) * average_cost(instance, solution);
}

double mean_utilization(const Instance& instance, const Solution& solution) {
    double total = 0.0;
    for (std::size_t e = 0; e < instance.num_edge(); ++e) total += node_utilization(instance, solution, e);
    return total / static_cast<double>(instance.num_edge());
}

FeasibilityReport check_feasibility(const Instance& instance, const Solution& solution) {
    if (!solution.matches(instance)) throw ConfigError("solution dimensions do not match the instance");

    FeasibilityReport report;
    auto add = [&](ConstraintId id, Location where, double magnitude) {
        report.violations.push_back({id, where, magnitude});
    };
    const std::size_t V = instance.total_variants();
    const double K = instance.max_replicas();

    // Assignment: exactly one (e, v) per demanded (i, m), none for undemanded pairs.
    // Assignments to unreachable nodes are reported here as well.
    for (std::size_t i = 0; i < instance.num_iot(); ++i) {
        for (std::size_t m = 0; m < instance.num_models(); ++m) {
            int assigned = 0;
            for (std::size_t e = 0; e < instance.num_edge(); ++e) {
                for (std::size_t v = 0; v < instance.num_variants(m); ++v) {
                    if (!solution.x(i, e, instance.flat_variant(m, v))) continue;
                    ++assigned;
                    if (!instance.reachable(i, e)) add(ConstraintId::assignment, at(i, e, m, v), 1.0);
                }
            }
            const int expected = instance.demanded(i, m) ? 1 : 0;
            if (assigned != expected)
                add(ConstraintId::assignment, {static_cast<int>(i), -1, static_cast<int>(m), -1},
                    std::abs(assigned - expected));
        }
    }

    // Latency requirement per (i, e, m).
    for (std::size_t i = 0; i < instance.num_iot(); ++i) {
        for (std::size_t e = 0; e < instance.num_edge(); ++e) {
            if (!instance.reachable(i, e)) continue;
            for (std::size_t m = 0; m < instance.num_models(); ++m) {
                double rtt = 0.0;
                bool any = false;
                for (std::size_t v = 0; v < instance.num_variants(m); ++v) {
                    const std::size_t f = instance.flat_variant(m, v);
                    if (!solution.x(i, e, f)) continue;
                    any = true;
                    rtt += instance.comm_latency(i, e) + inference_latency(instance, solution, e, f);
                }
                if (!any) continue;
                const double limit = instance.latency_req(i, m);
                if (limit <= 0.0) continue;  // undemanded pair, reported under assignment
                if (exceeds(rtt, limit))
                    add(ConstraintId::latency_req, {static_cast<int>(i), static_cast<int>(e), static_cast<int>(m), -1},
                        rtt - limit);
            }
        }
    }

    for (std::size_t e = 0; e < instance.num_edge(); ++e) {
        int total_instances = 0;
        for (std::size_t f = 0; f < V; ++f) {
            const auto [m, v] = instance.variant_key(f);
            const int n = solution.n(e, f);
            total_instances += n;

            if (n < 0) add(ConstraintId::replica_link, at(e, m, v), -n);

            double load = 0.0;
            for (std::size_t i = 0; i < instance.num_iot(); ++i) {
                if (!solution.x(i, e, f)) continue;
                load += instance.rate(i, m);
                if (n < 1) add(ConstraintId::replica_link, at(i, e, m, v), 1.0 - n);
            }
            const double served = instance.max_load(f) * n;
            if (exceeds(load, served)) add(ConstraintId::load, at(e, m, v), load - served);
            if (instance.replica_cap_mode() == ReplicaCapMode::per_variant && n > K)
                add(ConstraintId::replica_cap, at(e, m, v), n - K);
        }
        if (instance.replica_cap_mode() == ReplicaCapMode::aggregate && total_instances > K)
            add(ConstraintId::replica_cap, {-1, static_cast<int>(e), -1, -1}, total_instances - K);

        const double u = node_utilization(instance, solution, e);
        if (exceeds(u * instance.capacity(e), instance.capacity(e))) {
            add(ConstraintId::memory, {-1, static_cast<int>(e), -1, -1}, (u - 1.0) * instance.capacity(e));
            add(ConstraintId::utilization, {-1, static_cast<int>(e), -1, -1}, u - 1.0);
        }
    }
    return report;
}

}  // namespace mvsp
