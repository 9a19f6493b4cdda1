#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "mvsp/formulation.hpp"
#include "mvsp/generator.hpp"
#include "mvsp/instance.hpp"
#include "mvsp/solver.hpp"

namespace mvsp::testing {

/// Light enough that shapes with two or three variants are usually feasible.
inline constexpr double kSmallLoad = 2.0;

/// 2-3 IoT nodes, 2 edge nodes, 1-2 models, 2 variants; small enough for the oracle.
inline Instance tiny_instance(std::uint64_t seed, double load_mean = kSmallLoad) {
    const ProblemShape shape{2 + seed % 2, 2, 1 + (seed / 2) % 2, 2};
    GeneratorConfig config;
    config.shape = shape;
    config.seed = seed;
    config.load_mean = load_mean;
    return random_instance(config);
}

/// One IoT node `I1`, one edge node `E1`, direct link of `delay` ms, one model `m`
/// with the given variants' (latency, memory, load) triples.
struct VariantSpec {
    double latency;
    double memory;
    double max_load;
    double interference = 0.1;
};

inline Instance single_link_instance(std::vector<VariantSpec> variants, double rate, double delay = 11.0,
                                     double capacity = 8.0, Params params = {}) {
    Topology topo{{"I1"}, {"E1"}, {{"I1", "E1", delay}}, {{"E1", capacity}}};
    Model model{"m", {}};
    for (const auto& v : variants) model.variants.push_back({v.memory, v.max_load, {{"E1", v.latency}}, v.interference});
    DemandMatrix demand;
    if (rate > 0) demand.entries.push_back({"I1", "m", rate, 1000.0});
    return Instance::build(topo, {{model}}, demand, params);
}

/// Uniformly random assignment over reachable options of every demanded pair, n derived.
inline Solution random_assignment(const Instance& instance, std::mt19937_64& rng) {
    Solution s(instance);
    for (std::size_t i = 0; i < instance.num_iot(); ++i)
        for (std::size_t m = 0; m < instance.num_models(); ++m) {
            if (!instance.demanded(i, m)) continue;
            std::vector<std::pair<std::size_t, std::size_t>> options;
            for (std::size_t e = 0; e < instance.num_edge(); ++e)
                if (instance.reachable(i, e))
                    for (std::size_t v = 0; v < instance.num_variants(m); ++v)
                        options.emplace_back(e, instance.flat_variant(m, v));
            const auto [e, f] = options[std::uniform_int_distribution<std::size_t>(0, options.size() - 1)(rng)];
            s.set_x(i, e, f, true);
        }
    apply_derived_replicas(instance, s);
    return s;
}

inline std::optional<Solution> random_feasible(const Instance& instance, std::mt19937_64& rng, int tries = 2000) {
    for (int t = 0; t < tries; ++t) {
        Solution s = random_assignment(instance, rng);
        if (check_feasibility(instance, s).feasible()) return s;
    }
    return std::nullopt;
}

}  // namespace mvsp::testing
