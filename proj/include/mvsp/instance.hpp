#pragma once

#include <cstddef>
#include <limits>
#include <map>
#include <string>
#include <vector>

namespace mvsp {

struct Link {
    std::string from;
    std::string to;
    double delay = 0.0;  // ms

    bool operator==(const Link&) const = default;
};

struct Topology {
    std::vector<std::string> iot_nodes;
    std::vector<std::string> edge_nodes;
    std::vector<Link> links;
    std::map<std::string, double> capacity;  // edge node -> memory units

    bool operator==(const Topology&) const = default;
};

struct Variant {
    double memory_req = 0.0;
    double max_load = 0.0;                     // requests per interval
    std::map<std::string, double> base_latency;  // edge node -> ms, exclusive run
    double interference_coeff = 0.0;

    bool operator==(const Variant&) const = default;
};

struct Model {
    std::string name;
    std::vector<Variant> variants;

    bool operator==(const Model&) const = default;
};

struct VariantCatalog {
    std::vector<Model> models;

    bool operator==(const VariantCatalog&) const = default;
};

struct DemandEntry {
    std::string iot;
    std::string model;
    double rate = 0.0;
    double latency_req = 0.0;  // ms

    bool operator==(const DemandEntry&) const = default;
};

struct DemandMatrix {
    std::vector<DemandEntry> entries;

    bool operator==(const DemandMatrix&) const = default;
};

/// Affine function y(u) = slope * u + intercept.
struct Tangent {
    double slope = 0.0;
    double intercept = 0.0;

    double operator()(double u) const noexcept { return slope * u + intercept; }
    bool operator==(const Tangent&) const = default;
};

/// Utilization cost phi(u) = (e^{k u} - 1) / (e^k - 1), normalized to phi(0)=0 and phi(1)=1,
/// under-approximated by its tangent lines at `tangent_points`. An explicit tangent list
/// overrides the generated one.
struct CostConfig {
    double steepness = 4.0;
    std::vector<double> tangent_points = {0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
    std::vector<Tangent> explicit_tangents;

    double phi(double u) const;
    double phi_derivative(double u) const;
    std::vector<Tangent> tangents() const;

    bool operator==(const CostConfig&) const = default;
};

enum class ReplicaCapMode {
    per_variant,  // n[e,m,v] <= K for every variant
    aggregate,    // sum over (m,v) of n[e,m,v] <= K for every edge node
};

struct Params {
    double objective_weight = 0.1;
    int max_replicas = 2;
    bool round_trip = true;
    ReplicaCapMode replica_cap_mode = ReplicaCapMode::per_variant;
    CostConfig cost;

    bool operator==(const Params&) const = default;
};

/// (model, variant) pair, both zero-based.
struct VariantKey {
    std::size_t model = 0;
    std::size_t variant = 0;

    bool operator==(const VariantKey&) const = default;
};

inline constexpr double kUnreachable = std::numeric_limits<double>::infinity();

/// Minimum total link delay between two nodes, doubled when `round_trip` is set.
/// Throws LookupError for unknown nodes and UnreachableError when no path exists.
double shortest_path_delay(const Topology& topology, const std::string& iot_node,
                           const std::string& edge_node, bool round_trip = false);

/// Immutable, validated problem statement with dense indexed views of all parameters.
///
/// Variants are addressed either by VariantKey or by a flat index in
/// [0, total_variants()) ordered model-major.
class Instance {
public:
    /// Validates every invariant and precomputes communication latencies.
    /// Throws ValidationError naming the offending field.
    static Instance build(Topology topology, VariantCatalog catalog, DemandMatrix demand,
                          Params params);

    const Topology& topology() const noexcept { return topology_; }
    const VariantCatalog& catalog() const noexcept { return catalog_; }
    const DemandMatrix& demand() const noexcept { return demand_; }
    const Params& params() const noexcept { return params_; }

    std::size_t num_iot() const noexcept { return topology_.iot_nodes.size(); }
    std::size_t num_edge() const noexcept { return topology_.edge_nodes.size(); }
    std::size_t num_models() const noexcept { return catalog_.models.size(); }
    std::size_t num_variants(std::size_t model) const { return catalog_.models.at(model).variants.size(); }
    std::size_t total_variants() const noexcept { return variant_keys_.size(); }

    std::size_t flat_variant(std::size_t model, std::size_t variant) const {
        return model_offset_.at(model) + variant;
    }
    std::size_t flat_variant(VariantKey key) const { return flat_variant(key.model, key.variant); }
    VariantKey variant_key(std::size_t flat) const { return variant_keys_.at(flat); }
    std::size_t model_of(std::size_t flat) const { return variant_keys_[flat].model; }
    std::size_t model_offset(std::size_t model) const { return model_offset_.at(model); }

    std::size_t iot_index(const std::string& id) const;
    std::size_t edge_index(const std::string& id) const;
    std::size_t model_index(const std::string& name) const;

    /// CL_i^e in ms; kUnreachable when the IoT node has no path to the edge node.
    double comm_latency(std::size_t iot, std::size_t edge) const { return comm_latency_[iot * num_edge() + edge]; }
    bool reachable(std::size_t iot, std::size_t edge) const { return comm_latency(iot, edge) != kUnreachable; }

    double rate(std::size_t iot, std::size_t model) const { return rate_[iot * num_models() + model]; }
    double latency_req(std::size_t iot, std::size_t model) const { return latency_req_[iot * num_models() + model]; }
    bool demanded(std::size_t iot, std::size_t model) const { return rate(iot, model) > 0.0; }
    double total_rate() const noexcept { return total_rate_; }

    double base_latency(std::size_t edge, std::size_t flat) const { return base_latency_[edge * total_variants() + flat]; }
    double memory_req(std::size_t flat) const { return memory_req_[flat]; }
    double max_load(std::size_t flat) const { return max_load_[flat]; }
    double interference(std::size_t flat) const { return interference_[flat]; }
    double capacity(std::size_t edge) const { return capacity_[edge]; }

    double objective_weight() const noexcept { return params_.objective_weight; }
    int max_replicas() const noexcept { return params_.max_replicas; }
    ReplicaCapMode replica_cap_mode() const noexcept { return params_.replica_cap_mode; }
    const std::vector<Tangent>& cost_tangents() const noexcept { return tangents_; }

    /// Copy with different scalar parameters; topology, catalog and demand are shared verbatim.
    Instance with_params(Params params) const;

    bool operator==(const Instance& other) const {
        return topology_ == other.topology_ && catalog_ == other.catalog_ &&
               demand_ == other.demand_ && params_ == other.params_;
    }

private:
    Instance() = default;
    void index_and_validate();

    Topology topology_;
    VariantCatalog catalog_;
    DemandMatrix demand_;
    Params params_;

    std::map<std::string, std::size_t> iot_ids_;
    std::map<std::string, std::size_t> edge_ids_;
    std::map<std::string, std::size_t> model_ids_;
    std::vector<std::size_t> model_offset_;
    std::vector<VariantKey> variant_keys_;

    std::vector<double> comm_latency_;
    std::vector<double> rate_;
    std::vector<double> latency_req_;
    double total_rate_ = 0.0;
    std::vector<double> base_latency_;
    std::vector<double> memory_req_;
    std::vector<double> max_load_;
    std::vector<double> interference_;
    std::vector<double> capacity_;
    std::vector<Tangent> tangents_;
};

}  // namespace mvsp
