#include "mvsp/generator.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>
#include <utility>

#include "mvsp/errors.hpp"
#include "mvsp/io.hpp"
#include "default_catalog_json.hpp"

namespace mvsp {

namespace {

enum class Stream : std::uint64_t { topology = 1, hardware = 2, models = 3, demand = 4 };

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// std::uniform_*_distribution is implementation-defined; these mappings keep draws
// identical across standard libraries.
class Rng {
public:
    Rng(std::uint64_t seed, Stream stream)
        : engine_(splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(stream)))) {}

    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    std::size_t below(std::size_t n) {
        return std::min(n - 1, static_cast<std::size_t>(uniform() * static_cast<double>(n)));
    }

private:
    std::mt19937_64 engine_;
};

void require(bool condition, const std::string& field, const std::string& what) {
    if (!condition) throw ValidationError(field, what);
}

}  // namespace

const CatalogTemplate& default_catalog_template() {
    static const CatalogTemplate catalog = parse_catalog_template(kDefaultCatalogJson);
    return catalog;
}

Instance random_instance(const GeneratorConfig& config) {
    const auto& shape = config.shape;
    require(shape.iot_nodes >= 1, "shape.iot_nodes", "must be at least 1");
    require(shape.edge_nodes >= 1, "shape.edge_nodes", "must be at least 1");
    require(shape.models >= 1, "shape.models", "must be at least 1");
    require(shape.variants >= 1, "shape.variants", "must be at least 1");
    require(config.load_mean >= 1.0, "load_mean", "must be at least 1");
    require(config.link_delay_mean > 0.0, "link_delay_mean", "must be positive");
    require(shape.models <= config.catalog.models.size(), "shape.models",
            "catalog template has only " + std::to_string(config.catalog.models.size()) + " models");
    for (const auto& model : config.catalog.models)
        require(shape.variants <= model.variants.size(), "shape.variants",
                "model '" + model.name + "' has only " + std::to_string(model.variants.size()) +
                    " variants");

    Topology topology;
    for (std::size_t i = 0; i < shape.iot_nodes; ++i) topology.iot_nodes.push_back("I" + std::to_string(i + 1));
    for (std::size_t e = 0; e < shape.edge_nodes; ++e) topology.edge_nodes.push_back("E" + std::to_string(e + 1));
    for (const auto& id : topology.edge_nodes) topology.capacity[id] = config.capacity;

    // Edge nodes form a random tree; each IoT node hangs off an edge node or an earlier
    // IoT node; a few extra links close cycles.
    {
        Rng rng(config.seed, Stream::topology);
        const double mu = config.link_delay_mean;
        std::set<std::pair<std::string, std::string>> present;
        auto add = [&](const std::string& a, const std::string& b) {
            if (a == b || present.count({a, b}) || present.count({b, a})) return;
            present.insert({a, b});
            topology.links.push_back({a, b, rng.uniform(0.5 * mu, 1.5 * mu)});
        };
        for (std::size_t e = 1; e < shape.edge_nodes; ++e)
            add(topology.edge_nodes[e], topology.edge_nodes[rng.below(e)]);
        for (std::size_t i = 0; i < shape.iot_nodes; ++i) {
            bool to_edge = i == 0 || rng.uniform() < config.edge_attach_probability;
            const auto& peer = to_edge ? topology.edge_nodes[rng.below(shape.edge_nodes)]
                                       : topology.iot_nodes[rng.below(i)];
            add(topology.iot_nodes[i], peer);
        }
        std::vector<std::string> all = topology.iot_nodes;
        all.insert(all.end(), topology.edge_nodes.begin(), topology.edge_nodes.end());
        auto extra = static_cast<std::size_t>(std::lround(config.extra_link_ratio * static_cast<double>(all.size())));
        for (std::size_t k = 0; k < extra; ++k) {
            const auto& a = all[rng.below(all.size())];
            const auto& b = all[rng.below(all.size())];
            add(a, b);
        }
    }

    std::vector<double> speed(shape.edge_nodes);
    {
        Rng rng(config.seed, Stream::hardware);
        const double s = config.catalog.node_speed_spread;
        for (auto& factor : speed) factor = rng.uniform(1.0 - s, 1.0 + s);
    }

    VariantCatalog catalog;
    {
        Rng rng(config.seed, Stream::models);
        std::vector<std::size_t> order(config.catalog.models.size());
        std::iota(order.begin(), order.end(), 0);
        for (std::size_t k = 0; k < shape.models; ++k)
            std::swap(order[k], order[k + rng.below(order.size() - k)]);
        order.resize(shape.models);
        std::sort(order.begin(), order.end());
        for (std::size_t pick : order) {
            const auto& tmpl = config.catalog.models[pick];
            Model model{tmpl.name, {}};
            for (std::size_t v = 0; v < shape.variants; ++v) {
                const auto& vt = tmpl.variants[v];
                Variant variant{vt.memory, vt.max_load, {}, config.interference_coeff};
                for (std::size_t e = 0; e < shape.edge_nodes; ++e)
                    variant.base_latency[topology.edge_nodes[e]] = vt.latency * speed[e];
                model.variants.push_back(std::move(variant));
            }
            catalog.models.push_back(std::move(model));
        }
    }

    // Generous latency requirement: a multiple of the slowest variant plus the largest
    // IoT-to-edge delay. Built on a probe instance so the delay honors round_trip.
    double slowest = 0.0;
    for (const auto& model : catalog.models)
        for (const auto& variant : model.variants)
            for (const auto& [id, latency] : variant.base_latency) slowest = std::max(slowest, latency);
    Instance probe = Instance::build(topology, catalog, {}, config.params);
    double diameter = 0.0;
    for (std::size_t i = 0; i < probe.num_iot(); ++i)
        for (std::size_t e = 0; e < probe.num_edge(); ++e)
            if (probe.reachable(i, e)) diameter = std::max(diameter, probe.comm_latency(i, e));
    const double latency_req = config.latency_req_factor * slowest + diameter;

    DemandMatrix demand;
    {
        Rng rng(config.seed, Stream::demand);
        const double span = 2.0 * config.load_mean - 1.0;
        for (const auto& iot : topology.iot_nodes) {
            for (const auto& model : catalog.models) {
                double rate = 1.0 + std::floor(rng.uniform() * span);
                demand.entries.push_back({iot, model.name, std::min(rate, std::floor(span)), latency_req});
            }
        }
    }

    return Instance::build(std::move(topology), std::move(catalog), std::move(demand), config.params);
}

Instance random_instance(ProblemShape shape, std::uint64_t seed, double load_mean,
                         double link_delay_mean) {
    GeneratorConfig config;
    config.shape = shape;
    config.seed = seed;
    config.load_mean = load_mean;
    config.link_delay_mean = link_delay_mean;
    return random_instance(config);
}

}  // namespace mvsp
