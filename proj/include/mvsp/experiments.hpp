#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mvsp/formulation.hpp"
#include "mvsp/generator.hpp"
#include "mvsp/instance.hpp"
#include "mvsp/solver.hpp"

namespace mvsp {

enum class ExperimentKind { table3, colocation_sweep, load_sweep, alpha_sweep };

std::string_view to_string(ExperimentKind kind);
ExperimentKind experiment_from_string(std::string_view name);

struct ProblemSpec {
    std::string name;
    ProblemShape shape;

    bool operator==(const ProblemSpec&) const = default;
};

inline const ProblemSpec kProblemP1{"P1", {10, 5, 3, 8}};
inline const ProblemSpec kProblemP2{"P2", {11, 4, 4, 8}};

struct ExperimentConfig {
    ExperimentKind experiment = ExperimentKind::table3;
    std::vector<ProblemSpec> problems;
    std::vector<std::uint64_t> seeds;
    std::vector<int> max_replicas;  // K grid
    std::vector<double> load_means;  // E(r) grid; colocation_sweep uses low_load / high_load
    std::vector<double> alphas;      // objective weight grid
    double low_load = 5.5;
    double high_load = 33.0;
    double capacity = 8.0;
    double interference_coeff = 0.1;
    double link_delay_mean = 12.23;
    bool round_trip = false;  // one-way communication latency
    std::uint64_t node_budget = 100'000;  // per branch-and-bound run
    bool record_runtime = false;
    std::filesystem::path output;
    CatalogTemplate catalog = default_catalog_template();

    /// Throws ConfigError when a grid or the seed list is empty.
    void validate() const;
};

/// Grids, shapes and capacities of the four studies; seeds 1..10.
ExperimentConfig default_experiment(ExperimentKind kind);

/// Reads a config document. `seeds` is mandatory; every other field falls back to
/// default_experiment(kind). A relative `catalog` path resolves against `base_dir`.
ExperimentConfig experiment_config_from_json(std::string_view text, const std::filesystem::path& base_dir = {});
ExperimentConfig load_experiment_config(const std::filesystem::path& path);

/// The instance solved at one grid point.
Instance experiment_instance(const ExperimentConfig& config, const ProblemSpec& problem, std::uint64_t seed,
                             double load_mean, int max_replicas, double alpha);

struct RunRecord {
    std::string problem;
    std::uint64_t seed = 0;
    std::string load_class;  // colocation_sweep only: "low" or "high"
    double load_mean = 0.0;
    int max_replicas = 0;
    double alpha = 0.0;
    SolveStatus status = SolveStatus::infeasible;
    double latency = 0.0;
    double cost = 0.0;
    double utilization = 0.0;
    double objective = 0.0;
    std::uint64_t nodes = 0;
    double runtime = 0.0;
    std::optional<Solution> solution;
};

struct ExperimentResult {
    ExperimentKind experiment = ExperimentKind::table3;
    bool record_runtime = false;
    std::vector<RunRecord> rows;  // sorted by problem, seed, load class, grid value
};

/// Runs every (problem, seed) family. Within a family grid points are solved in order
/// with earlier solutions as warm starts; afterwards every grid point re-selects the best
/// feasible assignment found anywhere in the family (budget-limited runs only).
ExperimentResult run_experiment(const ExperimentConfig& config);

ExperimentResult run_table3(const ExperimentConfig& config);
ExperimentResult run_colocation_sweep(const ExperimentConfig& config);
ExperimentResult run_load_sweep(const ExperimentConfig& config);
ExperimentResult run_alpha_sweep(const ExperimentConfig& config);

std::vector<std::string> csv_header(ExperimentKind kind, bool record_runtime);
std::string to_csv(const ExperimentResult& result);

/// Shortest decimal text that parses back to the same double.
std::string format_number(double value);

/// Worker threads for experiment runs: MVSP_WORKERS if set, else hardware concurrency.
unsigned worker_count();

}  // namespace mvsp
