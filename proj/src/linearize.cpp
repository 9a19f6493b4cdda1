#include "mvsp/linearize.hpp"

#include <algorithm>
#include <cmath>

#include "mvsp/errors.hpp"

namespace mvsp {

namespace {

SparseVector normalized(SparseVector coefficients) {
    std::sort(coefficients.begin(), coefficients.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    SparseVector out;
    for (const auto& [col, value] : coefficients) {
        if (!out.empty() && out.back().first == col)
            out.back().second += value;
        else
            out.emplace_back(col, value);
    }
    std::erase_if(out, [](const auto& entry) { return entry.second == 0.0; });
    return out;
}

std::string dotted(std::initializer_list<std::size_t> indices) {
    std::string out;
    for (std::size_t index : indices) {
        if (!out.empty()) out += '.';
        out += std::to_string(index + 1);
    }
    return out;
}

}  // namespace

std::size_t MilpModel::add_variable(std::string var_name, VarKind kind, double lower, double upper) {
    if (!index_.emplace(var_name, variables_.size()).second)
        throw ConfigError("duplicate column name '" + var_name + "'");
    variables_.push_back({std::move(var_name), kind, lower, upper});
    return variables_.size() - 1;
}

std::size_t MilpModel::add_row(std::string row_name, SparseVector coefficients, Sense sense, double rhs) {
    rows_.push_back({std::move(row_name), normalized(std::move(coefficients)), sense, rhs});
    return rows_.size() - 1;
}

void MilpModel::set_objective(SparseVector coefficients, double constant) {
    objective_ = normalized(std::move(coefficients));
    objective_constant_ = constant;
}

std::optional<std::size_t> MilpModel::find(const std::string& var_name) const {
    auto it = index_.find(var_name);
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

std::size_t MilpModel::count(VarKind kind) const {
    return static_cast<std::size_t>(
        std::count_if(variables_.begin(), variables_.end(), [kind](const auto& v) { return v.kind == kind; }));
}

std::size_t MilpModel::count_prefix(const std::string& prefix) const {
    return static_cast<std::size_t>(std::count_if(variables_.begin(), variables_.end(), [&](const auto& v) {
        return v.name.compare(0, prefix.size(), prefix) == 0;
    }));
}

std::string x_name(std::size_t i, std::size_t e, std::size_t m, std::size_t v) { return "x_" + dotted({i, e, m, v}); }
std::string n_name(std::size_t e, std::size_t m, std::size_t v) { return "n_" + dotted({e, m, v}); }
std::string w_name(std::size_t i, std::size_t e, std::size_t m, std::size_t v, std::size_t m2, std::size_t v2) {
    return "w_" + dotted({i, e, m, v, m2, v2});
}
std::string z_name(std::size_t e) { return "z_" + dotted({e}); }

std::size_t expected_variable_count(const Instance& instance) {
    const std::size_t V = instance.total_variants();
    const std::size_t E = instance.num_edge();
    std::size_t aux = 0;
    for (std::size_t i = 0; i < instance.num_iot(); ++i)
        for (std::size_t m = 0; m < instance.num_models(); ++m)
            if (instance.demanded(i, m))
                for (std::size_t e = 0; e < E; ++e)
                    if (instance.reachable(i, e)) aux += instance.num_variants(m) * V;
    return instance.num_iot() * E * V + E * V + E + aux;
}

MilpModel glover_linearize(const Instance& instance) {
    MilpModel model;
    const std::size_t I = instance.num_iot();
    const std::size_t E = instance.num_edge();
    const std::size_t V = instance.total_variants();
    const double K = instance.max_replicas();
    const double alpha = instance.objective_weight();
    const double latency_scale = instance.total_rate() > 0.0 ? alpha / instance.total_rate() : 0.0;

    auto live = [&](std::size_t i, std::size_t e, std::size_t m) {
        return instance.demanded(i, m) && instance.reachable(i, e);
    };

    std::vector<std::size_t> x_col(I * E * V);
    for (std::size_t i = 0; i < I; ++i)
        for (std::size_t e = 0; e < E; ++e)
            for (std::size_t f = 0; f < V; ++f) {
                const auto [m, v] = instance.variant_key(f);
                x_col[(i * E + e) * V + f] =
                    model.add_variable(x_name(i, e, m, v), VarKind::binary, 0.0, live(i, e, m) ? 1.0 : 0.0);
            }
    std::vector<std::size_t> n_col(E * V);
    for (std::size_t e = 0; e < E; ++e)
        for (std::size_t f = 0; f < V; ++f) {
            const auto [m, v] = instance.variant_key(f);
            n_col[e * V + f] = model.add_variable(n_name(e, m, v), VarKind::integer, 0.0, K);
        }
    std::vector<std::size_t> z_col(E);
    for (std::size_t e = 0; e < E; ++e) z_col[e] = model.add_variable(z_name(e), VarKind::continuous, 0.0, kInfinity);

    SparseVector objective;
    for (std::size_t e = 0; e < E; ++e) objective.emplace_back(z_col[e], (1.0 - alpha) / static_cast<double>(E));

    for (std::size_t i = 0; i < I; ++i) {
        for (std::size_t m = 0; m < instance.num_models(); ++m) {
            if (!instance.demanded(i, m)) continue;
            const double rate = instance.rate(i, m);
            const std::size_t base = instance.model_offset(m);
            SparseVector assign;
            for (std::size_t e = 0; e < E; ++e) {
                if (!instance.reachable(i, e)) continue;
                const double cl = instance.comm_latency(i, e);
                SparseVector latency;
                for (std::size_t v = 0; v < instance.num_variants(m); ++v) {
                    const std::size_t f = base + v;
                    const std::size_t x = x_col[(i * E + e) * V + f];
                    assign.emplace_back(x, 1.0);
                    // CL + IL = CL + L (1 - a) + sum_g a_g L_g n_g whenever x = 1 (then n >= 1).
                    const double fixed = cl + instance.base_latency(e, f) * (1.0 - instance.interference(f));
                    latency.emplace_back(x, fixed);
                    objective.emplace_back(x, latency_scale * rate * fixed);
                    for (std::size_t g = 0; g < V; ++g) {
                        const auto [m2, v2] = instance.variant_key(g);
                        const std::size_t w = model.add_variable(w_name(i, e, m, v, m2, v2), VarKind::continuous, 0.0, K);
                        const std::size_t n = n_col[e * V + g];
                        const std::string suffix = w_name(i, e, m, v, m2, v2).substr(1);
                        model.add_row("gx" + suffix, {{w, 1.0}, {x, -K}}, Sense::le, 0.0);
                        model.add_row("gn" + suffix, {{w, 1.0}, {n, -1.0}}, Sense::le, 0.0);
                        model.add_row("gl" + suffix, {{w, 1.0}, {n, -1.0}, {x, -K}}, Sense::ge, -K);
                        const double weight = instance.interference(g) * instance.base_latency(e, g);
                        latency.emplace_back(w, weight);
                        objective.emplace_back(w, latency_scale * rate * weight);
                    }
                }
                model.add_row("lat_" + dotted({i, e, m}), std::move(latency), Sense::le, instance.latency_req(i, m));
            }
            model.add_row("assign_" + dotted({i, m}), std::move(assign), Sense::eq, 1.0);
        }
    }

    for (std::size_t e = 0; e < E; ++e) {
        const double cap = instance.capacity(e);
        const auto& tangents = instance.cost_tangents();
        for (std::size_t t = 0; t < tangents.size(); ++t) {
            SparseVector row{{z_col[e], 1.0}};
            for (std::size_t f = 0; f < V; ++f)
                row.emplace_back(n_col[e * V + f], -tangents[t].slope * instance.memory_req(f) / cap);
            model.add_row("tan_" + dotted({e, t}), std::move(row), Sense::ge, tangents[t].intercept);
        }
        SparseVector memory;
        for (std::size_t f = 0; f < V; ++f) memory.emplace_back(n_col[e * V + f], instance.memory_req(f));
        model.add_row("mem_" + dotted({e}), std::move(memory), Sense::le, cap);

        for (std::size_t f = 0; f < V; ++f) {
            const auto [m, v] = instance.variant_key(f);
            const std::size_t n = n_col[e * V + f];
            SparseVector load{{n, -instance.max_load(f)}};
            for (std::size_t i = 0; i < I; ++i) {
                if (!live(i, e, m)) continue;
                const std::size_t x = x_col[(i * E + e) * V + f];
                load.emplace_back(x, instance.rate(i, m));
                model.add_row("link_" + dotted({i, e, m, v}), {{x, 1.0}, {n, -1.0}}, Sense::le, 0.0);
            }
            model.add_row("load_" + dotted({e, m, v}), std::move(load), Sense::le, 0.0);
        }
        if (instance.replica_cap_mode() == ReplicaCapMode::aggregate) {
            SparseVector cap_row;
            for (std::size_t f = 0; f < V; ++f) cap_row.emplace_back(n_col[e * V + f], 1.0);
            model.add_row("cap_" + dotted({e}), std::move(cap_row), Sense::le, K);
        }
    }

    model.set_objective(std::move(objective));
    return model;
}

MilpEvaluation evaluate_milp(const MilpModel& model, std::span<const double> values, double tolerance) {
    const auto& vars = model.variables();
    if (values.size() != vars.size())
        throw ConfigError("expected " + std::to_string(vars.size()) + " values, got " + std::to_string(values.size()));

    MilpEvaluation result;
    result.objective = model.objective_constant();
    for (const auto& [col, c] : model.objective()) result.objective += c * values[col];

    for (std::size_t col = 0; col < vars.size(); ++col) {
        const auto& var = vars[col];
        const double value = values[col];
        if (value < var.lower - tolerance || value > var.upper + tolerance) result.violated.push_back("bound:" + var.name);
        if (var.kind != VarKind::continuous && std::abs(value - std::round(value)) > tolerance)
            result.violated.push_back("integrality:" + var.name);
    }
    for (const auto& row : model.rows()) {
        double lhs = 0.0;
        for (const auto& [col, c] : row.coefficients) lhs += c * values[col];
        const double slack = tolerance * std::max(1.0, std::abs(row.rhs));
        const bool ok = row.sense == Sense::le   ? lhs <= row.rhs + slack
                        : row.sense == Sense::ge ? lhs >= row.rhs - slack
                                                 : std::abs(lhs - row.rhs) <= slack;
        if (!ok) result.violated.push_back(row.name);
    }
    return result;
}

std::vector<double> embed_solution(const Instance& instance, const MilpModel& model, const Solution& solution) {
    std::vector<double> values(model.variables().size(), 0.0);
    auto set = [&](const std::string& name, double value) {
        if (auto col = model.find(name)) values[*col] = value;
    };
    const std::size_t V = instance.total_variants();
    for (std::size_t e = 0; e < instance.num_edge(); ++e) {
        for (std::size_t f = 0; f < V; ++f) {
            const auto [m, v] = instance.variant_key(f);
            set(n_name(e, m, v), solution.n(e, f));
            for (std::size_t i = 0; i < instance.num_iot(); ++i) {
                const int x = solution.x(i, e, f);
                set(x_name(i, e, m, v), x);
                if (!model.find(w_name(i, e, m, v, 0, 0))) continue;
                for (std::size_t g = 0; g < V; ++g) {
                    const auto [m2, v2] = instance.variant_key(g);
                    set(w_name(i, e, m, v, m2, v2), x * solution.n(e, g));
                }
            }
        }
        set(z_name(e), utilization_cost(instance, node_utilization(instance, solution, e)));
    }
    return values;
}

}  // namespace mvsp
