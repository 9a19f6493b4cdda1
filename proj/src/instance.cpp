#include "mvsp/instance.hpp"

#include <cmath>
#include <functional>
#include <queue>
#include <set>
#include <utility>

#include "mvsp/errors.hpp"

namespace mvsp {

namespace {

using Adjacency = std::vector<std::vector<std::pair<std::size_t, double>>>;

struct Graph {
    std::map<std::string, std::size_t> ids;
    Adjacency adjacency;
};

Graph make_graph(const Topology& topology) {
    Graph graph;
    for (const auto& id : topology.iot_nodes) graph.ids.emplace(id, graph.ids.size());
    for (const auto& id : topology.edge_nodes) graph.ids.emplace(id, graph.ids.size());
    graph.adjacency.resize(graph.ids.size());
    for (const auto& link : topology.links) {
        auto a = graph.ids.find(link.from);
        auto b = graph.ids.find(link.to);
        if (a == graph.ids.end() || b == graph.ids.end()) continue;  // rejected by validation
        graph.adjacency[a->second].emplace_back(b->second, link.delay);
        graph.adjacency[b->second].emplace_back(a->second, link.delay);
    }
    return graph;
}

std::vector<double> dijkstra(const Adjacency& adjacency, std::size_t source) {
    std::vector<double> dist(adjacency.size(), kUnreachable);
    using Entry = std::pair<double, std::size_t>;
    std::priority_queue<Entry, std::vector<Entry>, std::greater<>> queue;
    dist[source] = 0.0;
    queue.emplace(0.0, source);
    while (!queue.empty()) {
        auto [d, node] = queue.top();
        queue.pop();
        if (d > dist[node]) continue;
        for (auto [next, delay] : adjacency[node]) {
            double candidate = d + delay;
            if (candidate < dist[next]) {
                dist[next] = candidate;
                queue.emplace(candidate, next);
            }
        }
    }
    return dist;
}

std::string indexed(const std::string& base, std::size_t index) {
    return base + "[" + std::to_string(index) + "]";
}

void require(bool condition, const std::string& field, const std::string& what) {
    if (!condition) throw ValidationError(field, what);
}

}  // namespace

double CostConfig::phi(double u) const {
    return std::expm1(steepness * u) / std::expm1(steepness);
}

double CostConfig::phi_derivative(double u) const {
    return steepness * std::exp(steepness * u) / std::expm1(steepness);
}

std::vector<Tangent> CostConfig::tangents() const {
    if (!explicit_tangents.empty()) return explicit_tangents;
    std::vector<Tangent> out;
    out.reserve(tangent_points.size());
    for (double point : tangent_points) {
        double slope = phi_derivative(point);
        out.push_back({slope, phi(point) - slope * point});
    }
    return out;
}

double shortest_path_delay(const Topology& topology, const std::string& iot_node,
                           const std::string& edge_node, bool round_trip) {
    Graph graph = make_graph(topology);
    auto source = graph.ids.find(iot_node);
    if (source == graph.ids.end()) throw LookupError("unknown node '" + iot_node + "'");
    auto target = graph.ids.find(edge_node);
    if (target == graph.ids.end()) throw LookupError("unknown node '" + edge_node + "'");
    double delay = dijkstra(graph.adjacency, source->second)[target->second];
    if (delay == kUnreachable)
        throw UnreachableError("no path between '" + iot_node + "' and '" + edge_node + "'");
    return round_trip ? 2.0 * delay : delay;
}

Instance Instance::build(Topology topology, VariantCatalog catalog, DemandMatrix demand,
                         Params params) {
    Instance instance;
    instance.topology_ = std::move(topology);
    instance.catalog_ = std::move(catalog);
    instance.demand_ = std::move(demand);
    instance.params_ = std::move(params);
    instance.index_and_validate();
    return instance;
}

Instance Instance::with_params(Params params) const {
    return build(topology_, catalog_, demand_, std::move(params));
}

std::size_t Instance::iot_index(const std::string& id) const {
    auto it = iot_ids_.find(id);
    if (it == iot_ids_.end()) throw LookupError("unknown IoT node '" + id + "'");
    return it->second;
}

std::size_t Instance::edge_index(const std::string& id) const {
    auto it = edge_ids_.find(id);
    if (it == edge_ids_.end()) throw LookupError("unknown edge node '" + id + "'");
    return it->second;
}

std::size_t Instance::model_index(const std::string& name) const {
    auto it = model_ids_.find(name);
    if (it == model_ids_.end()) throw LookupError("unknown model '" + name + "'");
    return it->second;
}

void Instance::index_and_validate() {
    const auto& topo = topology_;

    // Topology.
    require(!topo.edge_nodes.empty(), "topology.edge_nodes", "at least one edge node is required");
    std::set<std::string> seen;
    for (std::size_t i = 0; i < topo.iot_nodes.size(); ++i) {
        const auto& id = topo.iot_nodes[i];
        require(!id.empty(), indexed("topology.iot_nodes", i), "empty identifier");
        require(seen.insert(id).second, indexed("topology.iot_nodes", i), "duplicate identifier '" + id + "'");
        iot_ids_.emplace(id, i);
    }
    for (std::size_t e = 0; e < topo.edge_nodes.size(); ++e) {
        const auto& id = topo.edge_nodes[e];
        require(!id.empty(), indexed("topology.edge_nodes", e), "empty identifier");
        require(seen.insert(id).second, indexed("topology.edge_nodes", e), "duplicate identifier '" + id + "'");
        edge_ids_.emplace(id, e);
    }
    for (std::size_t l = 0; l < topo.links.size(); ++l) {
        const auto& link = topo.links[l];
        const auto field = indexed("topology.links", l);
        require(seen.count(link.from) == 1, field + ".from", "unknown node '" + link.from + "'");
        require(seen.count(link.to) == 1, field + ".to", "unknown node '" + link.to + "'");
        require(std::isfinite(link.delay) && link.delay >= 0.0, field + ".delay",
                "delay must be finite and non-negative");
    }
    for (const auto& [id, cap] : topo.capacity)
        require(edge_ids_.count(id) == 1, "topology.capacity." + id, "not an edge node");
    capacity_.resize(num_edge());
    for (std::size_t e = 0; e < num_edge(); ++e) {
        const auto& id = topo.edge_nodes[e];
        auto it = topo.capacity.find(id);
        require(it != topo.capacity.end(), "topology.capacity." + id, "missing capacity");
        require(std::isfinite(it->second) && it->second > 0.0, "topology.capacity." + id,
                "capacity must be positive");
        capacity_[e] = it->second;
    }

    // Catalog.
    for (std::size_t m = 0; m < catalog_.models.size(); ++m) {
        const auto& model = catalog_.models[m];
        const auto field = indexed("catalog.models", m);
        require(!model.name.empty(), field + ".name", "empty model name");
        require(model_ids_.emplace(model.name, m).second, field + ".name",
                "duplicate model '" + model.name + "'");
        require(!model.variants.empty(), field + ".variants", "model has no variants");
        model_offset_.push_back(variant_keys_.size());
        for (std::size_t v = 0; v < model.variants.size(); ++v) {
            const auto& variant = model.variants[v];
            const auto vfield = indexed(field + ".variants", v);
            require(std::isfinite(variant.memory_req) && variant.memory_req > 0.0,
                    vfield + ".memory_req", "must be positive");
            require(std::isfinite(variant.max_load) && variant.max_load > 0.0,
                    vfield + ".max_load", "must be positive");
            require(std::isfinite(variant.interference_coeff) && variant.interference_coeff >= 0.0,
                    vfield + ".interference_coeff", "must be non-negative");
            for (const auto& [id, latency] : variant.base_latency)
                require(edge_ids_.count(id) == 1, vfield + ".base_latency." + id, "not an edge node");
            for (const auto& id : topo.edge_nodes) {
                auto it = variant.base_latency.find(id);
                require(it != variant.base_latency.end(), vfield + ".base_latency." + id,
                        "missing base latency");
                require(std::isfinite(it->second) && it->second > 0.0,
                        vfield + ".base_latency." + id, "must be positive");
            }
            variant_keys_.push_back({m, v});
            memory_req_.push_back(variant.memory_req);
            max_load_.push_back(variant.max_load);
            interference_.push_back(variant.interference_coeff);
        }
    }
    base_latency_.resize(num_edge() * total_variants());
    for (std::size_t f = 0; f < total_variants(); ++f) {
        auto [m, v] = variant_keys_[f];
        const auto& variant = catalog_.models[m].variants[v];
        for (std::size_t e = 0; e < num_edge(); ++e)
            base_latency_[e * total_variants() + f] = variant.base_latency.at(topo.edge_nodes[e]);
    }

    // Demand.
    rate_.assign(num_iot() * num_models(), 0.0);
    latency_req_.assign(num_iot() * num_models(), 0.0);
    std::vector<bool> present(num_iot() * num_models(), false);
    for (std::size_t k = 0; k < demand_.entries.size(); ++k) {
        const auto& entry = demand_.entries[k];
        const auto field = indexed("demand.entries", k);
        auto i = iot_ids_.find(entry.iot);
        require(i != iot_ids_.end(), field + ".iot", "unknown IoT node '" + entry.iot + "'");
        auto m = model_ids_.find(entry.model);
        require(m != model_ids_.end(), field + ".model", "unknown model '" + entry.model + "'");
        require(std::isfinite(entry.rate) && entry.rate >= 0.0, field + ".rate", "must be non-negative");
        require(std::isfinite(entry.latency_req) && entry.latency_req > 0.0, field + ".latency_req",
                "must be positive");
        std::size_t slot = i->second * num_models() + m->second;
        require(!present[slot], field, "duplicate entry for (" + entry.iot + ", " + entry.model + ")");
        present[slot] = true;
        rate_[slot] = entry.rate;
        latency_req_[slot] = entry.latency_req;
        total_rate_ += entry.rate;
    }

    // Params.
    const auto& p = params_;
    require(p.objective_weight >= 0.0 && p.objective_weight <= 1.0, "params.objective_weight",
            "must lie in [0, 1]");
    require(p.max_replicas >= 1, "params.max_replicas", "must be a positive integer");
    require(std::isfinite(p.cost.steepness) && p.cost.steepness > 0.0, "params.cost.steepness",
            "must be positive");
    for (double point : p.cost.tangent_points)
        require(std::isfinite(point) && point >= 0.0 && point <= 1.0, "params.cost.tangent_points",
                "points must lie in [0, 1]");
    tangents_ = p.cost.tangents();
    require(!tangents_.empty(), "params.cost_tangents", "tangent set is empty");
    for (std::size_t t = 0; t < tangents_.size(); ++t) {
        const auto& y = tangents_[t];
        const auto field = indexed("params.cost_tangents", t);
        require(std::isfinite(y.slope) && std::isfinite(y.intercept), field, "non-finite coefficients");
        require(y.slope >= 0.0, field, "slope must be non-negative");
        constexpr int kSamples = 1000;
        for (int s = 0; s <= kSamples; ++s) {
            double u = static_cast<double>(s) / kSamples;
            require(y(u) <= p.cost.phi(u) + 1e-9, field,
                    "tangent exceeds the cost function at u=" + std::to_string(u));
        }
    }

    // Communication latencies.
    Graph graph = make_graph(topo);
    comm_latency_.assign(num_iot() * num_edge(), kUnreachable);
    for (std::size_t i = 0; i < num_iot(); ++i) {
        auto dist = dijkstra(graph.adjacency, graph.ids.at(topo.iot_nodes[i]));
        bool any = false;
        for (std::size_t e = 0; e < num_edge(); ++e) {
            double d = dist[graph.ids.at(topo.edge_nodes[e])];
            if (d == kUnreachable) continue;
            comm_latency_[i * num_edge() + e] = p.round_trip ? 2.0 * d : d;
            any = true;
        }
        require(any, indexed("topology.iot_nodes", i),
                "IoT node '" + topo.iot_nodes[i] + "' cannot reach any edge node");
    }
}

}  // namespace mvsp
