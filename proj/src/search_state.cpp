#include "search_state.hpp"

#include <algorithm>
#include <limits>

namespace mvsp::detail {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

double tolerance_for(double value) { return kFeasibilityTolerance * std::max(1.0, std::abs(value)); }
}  // namespace

SearchState::SearchState(const Instance& instance) : instance_(instance) {
    const std::size_t E = instance.num_edge();
    const std::size_t V = instance.total_variants();
    for (const auto& dp : branching_order(instance)) {
        Pair pair{dp.iot, dp.model, dp.rate, {}, {}};
        const std::size_t Vm = instance.num_variants(dp.model);
        pair.option_at.assign(E * Vm, -1);
        const double limit = instance.latency_req(dp.iot, dp.model);
        for (std::size_t e = 0; e < E; ++e) {
            if (!instance.reachable(dp.iot, e)) continue;
            const double cl = instance.comm_latency(dp.iot, e);
            for (std::size_t v = 0; v < Vm; ++v) {
                const std::size_t f = instance.flat_variant(dp.model, v);
                const double base = instance.base_latency(e, f);
                const double a = instance.interference(f);
                const double fixed = cl + base * (1.0 - a);
                pair.option_at[e * Vm + v] = static_cast<int>(pair.options.size());
                pair.options.push_back({e, f, cl, fixed, a * base, limit - fixed + tolerance_for(limit)});
            }
        }
        pairs_.push_back(std::move(pair));
    }
    choice_.assign(pairs_.size(), -1);
    load_.assign(E * V, 0.0);
    n_.assign(E * V, 0);
    memory_.assign(E, 0.0);
    interference_.assign(E, 0.0);
    weighted_.assign(E, 0.0);
    routed_.assign(E, 0.0);
    instances_.assign(E, 0);
    slack_.assign(E, {});
}

void SearchState::clear() {
    for (std::size_t p = 0; p < pairs_.size(); ++p)
        if (choice_[p] >= 0) unassign(p);
}

SearchState::Change SearchState::change_for(std::size_t edge, std::size_t flat, double delta_load) const {
    const std::size_t k = edge * instance_.total_variants() + flat;
    const double load = load_[k] + delta_load;
    return {n_[k], replicas_for(load > 1e-12 ? load : 0.0, instance_.max_load(flat))};
}

double SearchState::node_cost(std::size_t edge, double memory) const {
    return utilization_cost(instance_, memory / instance_.capacity(edge));
}

bool SearchState::node_ok(std::size_t edge, double memory, double interference, int instances,
                          double extra_slack) const {
    const double cap = instance_.capacity(edge);
    if (memory > cap + tolerance_for(cap)) return false;
    if (instance_.replica_cap_mode() == ReplicaCapMode::aggregate && instances > instance_.max_replicas())
        return false;
    double slack = extra_slack;
    if (!slack_[edge].empty()) slack = std::min(slack, *slack_[edge].begin());
    return interference <= slack;
}

bool SearchState::can_assign(std::size_t p, std::size_t o) const {
    const auto& pair = pairs_[p];
    const auto& opt = pair.options[o];
    const auto [old_n, new_n] = change_for(opt.edge, opt.flat, pair.rate);
    if (instance_.replica_cap_mode() == ReplicaCapMode::per_variant && new_n > instance_.max_replicas()) return false;
    const int dn = new_n - old_n;
    const std::size_t e = opt.edge;
    return node_ok(e, memory_[e] + instance_.memory_req(opt.flat) * dn, interference_[e] + opt.interference * dn,
                   instances_[e] + dn, opt.slack);
}

void SearchState::assign(std::size_t p, std::size_t o) {
    const auto& pair = pairs_[p];
    const auto& opt = pair.options[o];
    const std::size_t e = opt.edge;
    const std::size_t k = e * instance_.total_variants() + opt.flat;
    const auto [old_n, new_n] = change_for(e, opt.flat, pair.rate);
    const int dn = new_n - old_n;
    load_[k] += pair.rate;
    n_[k] = new_n;
    memory_[e] += instance_.memory_req(opt.flat) * dn;
    interference_[e] += opt.interference * dn;
    instances_[e] += dn;
    weighted_[e] += pair.rate * (opt.fixed - opt.cl);
    routed_[e] += pair.rate;
    comm_ += pair.rate * opt.cl;
    slack_[e].insert(opt.slack);
    choice_[p] = static_cast<int>(o);
    ++num_assigned_;
}

void SearchState::unassign(std::size_t p) {
    const auto& pair = pairs_[p];
    const auto& opt = pair.options[static_cast<std::size_t>(choice_[p])];
    const std::size_t e = opt.edge;
    const std::size_t k = e * instance_.total_variants() + opt.flat;
    const auto [old_n, new_n] = change_for(e, opt.flat, -pair.rate);
    const int dn = new_n - old_n;
    load_[k] -= pair.rate;
    if (load_[k] < 1e-12) load_[k] = 0.0;
    n_[k] = new_n;
    memory_[e] += instance_.memory_req(opt.flat) * dn;
    interference_[e] += opt.interference * dn;
    instances_[e] += dn;
    weighted_[e] -= pair.rate * (opt.fixed - opt.cl);
    routed_[e] -= pair.rate;
    comm_ -= pair.rate * opt.cl;
    slack_[e].erase(slack_[e].find(opt.slack));
    choice_[p] = -1;
    --num_assigned_;
}

double SearchState::objective() const {
    const double alpha = instance_.objective_weight();
    double latency = comm_;
    double cost = 0.0;
    for (std::size_t e = 0; e < instance_.num_edge(); ++e) {
        latency += weighted_[e] + routed_[e] * interference_[e];
        cost += node_cost(e, memory_[e]);
    }
    const double total = instance_.total_rate();
    const double avg_latency = total > 0.0 ? latency / total : 0.0;
    return alpha * avg_latency + (1.0 - alpha) * cost / static_cast<double>(instance_.num_edge());
}

double SearchState::bound() const {
    const double alpha = instance_.objective_weight();
    const std::size_t V = instance_.total_variants();
    double latency = comm_;
    double cost = 0.0;
    for (std::size_t e = 0; e < instance_.num_edge(); ++e) {
        latency += weighted_[e] + routed_[e] * interference_[e];
        cost += node_cost(e, memory_[e]);
    }
    for (std::size_t p = 0; p < pairs_.size(); ++p) {
        if (choice_[p] >= 0) continue;
        const auto& pair = pairs_[p];
        // Cheapest option by value; only fall back to a full feasibility scan if it is blocked.
        auto value = [&](const Option& opt) {
            const bool deployed = n_[opt.edge * V + opt.flat] > 0;
            return opt.fixed + interference_[opt.edge] + (deployed ? 0.0 : opt.interference);
        };
        std::size_t best = 0;
        double best_value = kInf;
        for (std::size_t o = 0; o < pair.options.size(); ++o) {
            const double v = value(pair.options[o]);
            if (v < best_value) {
                best_value = v;
                best = o;
            }
        }
        if (!can_assign(p, best)) {
            best_value = kInf;
            for (std::size_t o = 0; o < pair.options.size(); ++o)
                if (can_assign(p, o)) best_value = std::min(best_value, value(pair.options[o]));
            if (best_value == kInf) return kInf;
        }
        latency += pair.rate * best_value;
    }
    const double total = instance_.total_rate();
    const double avg_latency = total > 0.0 ? latency / total : 0.0;
    return alpha * avg_latency + (1.0 - alpha) * cost / static_cast<double>(instance_.num_edge());
}

int SearchState::option_index(std::size_t p, std::size_t edge, std::size_t flat) const {
    const auto& pair = pairs_[p];
    const std::size_t v = flat - instance_.model_offset(pair.model);
    return pair.option_at[edge * instance_.num_variants(pair.model) + v];
}

Solution SearchState::to_solution() const {
    Solution solution(instance_);
    for (std::size_t p = 0; p < pairs_.size(); ++p) {
        if (choice_[p] < 0) continue;
        const auto& opt = pairs_[p].options[static_cast<std::size_t>(choice_[p])];
        solution.set_x(pairs_[p].iot, opt.edge, opt.flat, true);
    }
    solution.n_values() = n_;
    fill_costs(instance_, solution);
    return solution;
}

void SearchState::load(const Solution& solution) {
    clear();
    for (std::size_t p = 0; p < pairs_.size(); ++p) {
        const auto& pair = pairs_[p];
        for (std::size_t o = 0; o < pair.options.size(); ++o) {
            if (solution.x(pair.iot, pair.options[o].edge, pair.options[o].flat)) {
                assign(p, o);
                break;
            }
        }
    }
}

}  // namespace mvsp::detail
