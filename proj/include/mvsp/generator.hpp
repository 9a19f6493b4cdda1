#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "mvsp/instance.hpp"

namespace mvsp {

struct ProblemShape {
    std::size_t iot_nodes = 0;
    std::size_t edge_nodes = 0;
    std::size_t models = 0;
    std::size_t variants = 0;

    bool operator==(const ProblemShape&) const = default;
};

/// Reference figures of one variant on a nominal node; per-node latencies are scaled
/// by a per-node speed factor when an instance is drawn.
struct VariantTemplate {
    int batch = 1;
    double latency = 0.0;  // ms
    double memory = 0.0;
    double max_load = 0.0;

    bool operator==(const VariantTemplate&) const = default;
};

struct ModelTemplate {
    std::string name;
    std::vector<VariantTemplate> variants;

    bool operator==(const ModelTemplate&) const = default;
};

struct CatalogTemplate {
    std::vector<ModelTemplate> models;
    double node_speed_spread = 0.2;  // speed factor drawn from [1 - s, 1 + s]

    bool operator==(const CatalogTemplate&) const = default;
};

/// The catalog shipped in configs/default_catalog.json (embedded at build time).
const CatalogTemplate& default_catalog_template();

struct GeneratorConfig {
    ProblemShape shape;
    std::uint64_t seed = 1;
    double load_mean = 5.5;         // E(r)
    double link_delay_mean = 12.23;  // ms
    double capacity = 8.0;
    double interference_coeff = 0.1;
    double edge_attach_probability = 0.7;
    double extra_link_ratio = 0.2;
    double latency_req_factor = 10.0;
    Params params;
    CatalogTemplate catalog = default_catalog_template();
};

/// Draws a connected random topology, picks models from the catalog template and draws
/// integer request rates uniform on [1, 2 E(r) - 1].
///
/// Each ingredient uses its own random stream derived from the seed, so two configs that
/// differ only in `load_mean` share topology and catalog, and every rate is non-decreasing
/// in `load_mean`.
Instance random_instance(const GeneratorConfig& config);

Instance random_instance(ProblemShape shape, std::uint64_t seed, double load_mean = 5.5,
                         double link_delay_mean = 12.23);

}  // namespace mvsp
