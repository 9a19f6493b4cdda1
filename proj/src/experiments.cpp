#include "mvsp/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <tuple>

#include <json.hpp>

#include "mvsp/errors.hpp"
#include "mvsp/io.hpp"

namespace mvsp {

namespace {

using Json = nlohmann::json;

struct GridPoint {
    double load_mean;
    int max_replicas;
    double alpha;
};

struct Family {
    const ProblemSpec* problem;
    std::uint64_t seed;
    std::string load_class;
    std::vector<GridPoint> grid;
};

std::vector<Family> families(const ExperimentConfig& config) {
    std::vector<std::pair<std::string, std::vector<double>>> classes;
    if (config.experiment == ExperimentKind::colocation_sweep)
        classes = {{"low", {config.low_load}}, {"high", {config.high_load}}};
    else
        classes = {{"", config.load_means}};

    std::vector<Family> out;
    for (const auto& problem : config.problems)
        for (auto seed : config.seeds)
            for (const auto& [name, loads] : classes) {
                Family family{&problem, seed, name, {}};
                for (double load : loads)
                    for (int k : config.max_replicas)
                        for (double alpha : config.alphas) family.grid.push_back({load, k, alpha});
                out.push_back(std::move(family));
            }
    return out;
}

void fill_record(RunRecord& row, const Instance& instance, const Solution& solution) {
    row.latency = average_latency(instance, solution);
    row.cost = average_cost(instance, solution);
    row.utilization = mean_utilization(instance, solution);
    row.objective = objective(instance, solution);
    row.solution = solution;
}

std::vector<RunRecord> run_family(const ExperimentConfig& config, const Family& family) {
    std::vector<Instance> instances;
    std::vector<RunRecord> rows;
    std::vector<Solution> pool;
    SolveBudget budget;
    budget.max_nodes = config.node_budget;

    for (const auto& point : family.grid) {
        instances.push_back(experiment_instance(config, *family.problem, family.seed, point.load_mean,
                                                point.max_replicas, point.alpha));
        const Instance& instance = instances.back();
        ExactOptions options;
        options.warm_starts = pool;
        SolveResult result = solve_exact(instance, budget, options);

        RunRecord row;
        row.problem = family.problem->name;
        row.seed = family.seed;
        row.load_class = family.load_class;
        row.load_mean = point.load_mean;
        row.max_replicas = point.max_replicas;
        row.alpha = point.alpha;
        row.status = result.status;
        row.nodes = result.nodes_explored;
        row.runtime = result.elapsed_seconds;
        if (result.solution) {
            fill_record(row, instance, *result.solution);
            pool.push_back(*result.solution);
        }
        rows.push_back(std::move(row));
    }

    // Budget-limited points take the best assignment found anywhere in the family.
    for (std::size_t g = 0; g < rows.size(); ++g) {
        RunRecord& row = rows[g];
        if (row.status == SolveStatus::optimal || row.status == SolveStatus::infeasible) continue;
        const Instance& instance = instances[g];
        for (const auto& candidate : pool) {
            Solution s = candidate;
            apply_derived_replicas(instance, s);
            if (!check_feasibility(instance, s).feasible()) continue;
            const double value = objective(instance, s);
            if (!row.solution || value < row.objective - kObjectiveTolerance) fill_record(row, instance, s);
        }
    }
    return rows;
}

double number_field(const Json& j, const char* key, double fallback) {
    if (!j.contains(key)) return fallback;
    if (!j[key].is_number()) throw ValidationError(key, "expected a number");
    return j[key].get<double>();
}

template <typename T>
std::vector<T> list_field(const Json& j, const char* key, std::vector<T> fallback) {
    if (!j.contains(key)) return fallback;
    try {
        return j[key].get<std::vector<T>>();
    } catch (const Json::exception&) {
        throw ValidationError(key, "expected a list of numbers");
    }
}

}  // namespace

std::string_view to_string(ExperimentKind kind) {
    switch (kind) {
        case ExperimentKind::table3: return "table3";
        case ExperimentKind::colocation_sweep: return "colocation_sweep";
        case ExperimentKind::load_sweep: return "load_sweep";
        case ExperimentKind::alpha_sweep: return "alpha_sweep";
    }
    return "table3";
}

ExperimentKind experiment_from_string(std::string_view name) {
    for (auto kind : {ExperimentKind::table3, ExperimentKind::colocation_sweep, ExperimentKind::load_sweep,
                      ExperimentKind::alpha_sweep})
        if (to_string(kind) == name) return kind;
    throw ValidationError("experiment", "unknown experiment '" + std::string(name) + "'");
}

void ExperimentConfig::validate() const {
    if (problems.empty()) throw ConfigError("problems: list is empty");
    if (seeds.empty()) throw ConfigError("seeds: list is empty");
    if (max_replicas.empty()) throw ConfigError("max_replicas: grid is empty");
    if (alphas.empty()) throw ConfigError("alphas: grid is empty");
    if (experiment != ExperimentKind::colocation_sweep && load_means.empty())
        throw ConfigError("load_means: grid is empty");
    if (node_budget == 0) throw ConfigError("node_budget: must be positive");
}

ExperimentConfig default_experiment(ExperimentKind kind) {
    ExperimentConfig config;
    config.experiment = kind;
    config.problems = {kProblemP1};
    config.seeds = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
    config.max_replicas = {2};
    config.alphas = {0.1};
    config.load_means = {5.5, 22.0, 33.0};
    switch (kind) {
        case ExperimentKind::table3:
            config.problems = {kProblemP1, kProblemP2};
            config.output = "table3.csv";
            break;
        case ExperimentKind::colocation_sweep:
            config.max_replicas = {1, 2, 3, 4};
            config.load_means.clear();
            config.output = "colocation_sweep.csv";
            break;
        case ExperimentKind::load_sweep:
            config.capacity = 5.0;
            config.load_means = {5.5, 11.0, 16.5, 22.0, 27.5, 33.0};
            config.output = "load_sweep.csv";
            break;
        case ExperimentKind::alpha_sweep:
            config.capacity = 5.0;
            config.load_means = {27.5};
            config.alphas = {0.0, 0.02, 0.04, 0.1, 0.2, 0.3};
            config.output = "alpha_sweep.csv";
            break;
    }
    return config;
}

ExperimentConfig experiment_config_from_json(std::string_view text, const std::filesystem::path& base_dir) {
    Json doc;
    try {
        doc = Json::parse(text.begin(), text.end());
    } catch (const Json::parse_error& e) {
        throw ParseError(std::string("malformed config: ") + e.what());
    }
    if (!doc.is_object()) throw ValidationError("experiment", "config must be an object");
    if (!doc.contains("experiment") || !doc["experiment"].is_string())
        throw ValidationError("experiment", "missing field");
    ExperimentConfig config = default_experiment(experiment_from_string(doc["experiment"].get<std::string>()));

    if (!doc.contains("seeds")) throw ValidationError("seeds", "missing field (seeds must be explicit)");
    config.seeds = list_field<std::uint64_t>(doc, "seeds", {});

    if (doc.contains("problems")) {
        config.problems.clear();
        if (!doc["problems"].is_array()) throw ValidationError("problems", "expected a list");
        for (std::size_t k = 0; k < doc["problems"].size(); ++k) {
            const Json& p = doc["problems"][k];
            const std::string path = "problems[" + std::to_string(k) + "]";
            if (!p.contains("name") || !p.contains("shape") || !p["shape"].is_array() || p["shape"].size() != 4)
                throw ValidationError(path, "expected {name, shape: [iot, edge, models, variants]}");
            const auto s = p["shape"].get<std::vector<std::size_t>>();
            config.problems.push_back({p["name"].get<std::string>(), {s[0], s[1], s[2], s[3]}});
        }
    }
    config.max_replicas = list_field<int>(doc, "max_replicas", config.max_replicas);
    config.load_means = list_field<double>(doc, "load_means", config.load_means);
    config.alphas = list_field<double>(doc, "alphas", config.alphas);
    config.low_load = number_field(doc, "low_load", config.low_load);
    config.high_load = number_field(doc, "high_load", config.high_load);
    config.capacity = number_field(doc, "capacity", config.capacity);
    config.interference_coeff = number_field(doc, "interference_coeff", config.interference_coeff);
    config.link_delay_mean = number_field(doc, "link_delay_mean", config.link_delay_mean);
    if (doc.contains("round_trip")) config.round_trip = doc["round_trip"].get<bool>();
    config.node_budget = static_cast<std::uint64_t>(number_field(doc, "node_budget", static_cast<double>(config.node_budget)));
    if (doc.contains("record_runtime")) config.record_runtime = doc["record_runtime"].get<bool>();
    if (doc.contains("output")) config.output = doc["output"].get<std::string>();
    if (doc.contains("catalog")) {
        std::filesystem::path path = doc["catalog"].get<std::string>();
        if (path.is_relative()) path = base_dir / path;
        config.catalog = parse_catalog_template(read_text(path));
    }
    config.validate();
    return config;
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
    return experiment_config_from_json(read_text(path), path.parent_path());
}

Instance experiment_instance(const ExperimentConfig& config, const ProblemSpec& problem, std::uint64_t seed,
                             double load_mean, int max_replicas, double alpha) {
    GeneratorConfig gen;
    gen.shape = problem.shape;
    gen.seed = seed;
    gen.load_mean = load_mean;
    gen.link_delay_mean = config.link_delay_mean;
    gen.capacity = config.capacity;
    gen.interference_coeff = config.interference_coeff;
    gen.catalog = config.catalog;
    gen.params.objective_weight = alpha;
    gen.params.max_replicas = max_replicas;
    gen.params.round_trip = config.round_trip;
    return random_instance(gen);
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
    config.validate();
    const auto work = families(config);
    std::vector<std::vector<RunRecord>> results(work.size());

    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        for (std::size_t k = next++; k < work.size(); k = next++) {
            try {
                results[k] = run_family(config, work[k]);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
            }
        }
    };
    const unsigned threads = std::min<std::size_t>(worker_count(), work.size());
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
        for (auto& thread : pool) thread.join();
    }
    if (failure) std::rethrow_exception(failure);

    ExperimentResult out{config.experiment, config.record_runtime, {}};
    for (auto& rows : results)
        for (auto& row : rows) out.rows.push_back(std::move(row));
    // Families are already in problem / seed / class order; within a family sort the grid.
    std::stable_sort(out.rows.begin(), out.rows.end(), [&](const RunRecord& a, const RunRecord& b) {
        auto problem_rank = [&](const std::string& name) {
            for (std::size_t k = 0; k < config.problems.size(); ++k)
                if (config.problems[k].name == name) return k;
            return config.problems.size();
        };
        auto class_rank = [](const std::string& c) { return c == "high" ? 1 : 0; };
        return std::make_tuple(problem_rank(a.problem), a.seed, class_rank(a.load_class), a.load_mean,
                               a.max_replicas, a.alpha) <
               std::make_tuple(problem_rank(b.problem), b.seed, class_rank(b.load_class), b.load_mean,
                               b.max_replicas, b.alpha);
    });
    return out;
}

namespace {

ExperimentResult run_as(ExperimentConfig config, ExperimentKind kind) {
    config.experiment = kind;
    return run_experiment(config);
}

}  // namespace

ExperimentResult run_table3(const ExperimentConfig& config) { return run_as(config, ExperimentKind::table3); }
ExperimentResult run_colocation_sweep(const ExperimentConfig& config) {
    return run_as(config, ExperimentKind::colocation_sweep);
}
ExperimentResult run_load_sweep(const ExperimentConfig& config) { return run_as(config, ExperimentKind::load_sweep); }
ExperimentResult run_alpha_sweep(const ExperimentConfig& config) { return run_as(config, ExperimentKind::alpha_sweep); }

std::vector<std::string> csv_header(ExperimentKind kind, bool record_runtime) {
    std::vector<std::string> header;
    switch (kind) {
        case ExperimentKind::table3:
            header = {"problem", "seed", "load_mean", "cost", "latency", "status", "nodes"};
            break;
        case ExperimentKind::colocation_sweep:
            header = {"problem", "seed", "load_class", "load_mean", "max_replicas", "latency", "cost",
                      "utilization", "status", "nodes"};
            break;
        case ExperimentKind::load_sweep:
            header = {"problem", "seed", "load_mean", "latency", "cost", "utilization", "status", "nodes"};
            break;
        case ExperimentKind::alpha_sweep:
            header = {"problem", "seed", "alpha", "latency", "cost", "utilization", "status", "nodes"};
            break;
    }
    if (record_runtime) header.push_back("runtime_s");
    return header;
}

std::string format_number(double value) {
    if (std::isnan(value)) return "nan";
    if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
    char buffer[64];
    auto [end, ec] = std::to_chars(buffer, buffer + sizeof buffer, value);
    return std::string(buffer, end);
}

std::string to_csv(const ExperimentResult& result) {
    std::string out;
    auto line = [&](const std::vector<std::string>& cells) {
        for (std::size_t k = 0; k < cells.size(); ++k) {
            if (k) out += ',';
            out += cells[k];
        }
        out += '\n';
    };
    line(csv_header(result.experiment, result.record_runtime));
    for (const auto& row : result.rows) {
        const bool solved = row.solution.has_value();
        auto num = [&](double v) { return solved ? format_number(v) : std::string(); };
        const std::string status(to_string(row.status));
        const std::string nodes = std::to_string(row.nodes);
        std::vector<std::string> cells;
        switch (result.experiment) {
            case ExperimentKind::table3:
                cells = {row.problem, std::to_string(row.seed), format_number(row.load_mean), num(row.cost),
                         num(row.latency), status, nodes};
                break;
            case ExperimentKind::colocation_sweep:
                cells = {row.problem, std::to_string(row.seed), row.load_class, format_number(row.load_mean),
                         std::to_string(row.max_replicas), num(row.latency), num(row.cost), num(row.utilization),
                         status, nodes};
                break;
            case ExperimentKind::load_sweep:
                cells = {row.problem, std::to_string(row.seed), format_number(row.load_mean), num(row.latency),
                         num(row.cost), num(row.utilization), status, nodes};
                break;
            case ExperimentKind::alpha_sweep:
                cells = {row.problem, std::to_string(row.seed), format_number(row.alpha), num(row.latency),
                         num(row.cost), num(row.utilization), status, nodes};
                break;
        }
        if (result.record_runtime) cells.push_back(format_number(row.runtime));
        line(cells);
    }
    return out;
}

unsigned worker_count() {
    if (const char* env = std::getenv("MVSP_WORKERS")) {
        char* end = nullptr;
        const long value = std::strtol(env, &end, 10);
        if (end != env && value >= 1) return static_cast<unsigned>(value);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

}  // namespace mvsp
