// Acceptance suite: one PASS/FAIL line per criterion.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mvsp/experiments.hpp"
#include "mvsp/io.hpp"
#include "mvsp/linearize.hpp"
#include "mvsp/oracle.hpp"
#include "mvsp/solver.hpp"
#include "support.hpp"

using namespace mvsp;
using mvsp::testing::kSmallLoad;

namespace {

constexpr double kTol = 1e-9;

struct Outcome {
    bool pass = false;
    std::string detail;
};

struct Criterion {
    int id;
    std::string name;
    double time_limit;  // seconds; <= 0 means none
    std::function<Outcome()> check;
};

std::string fmt(const char* format, auto... args) {
    char buffer[512];
    std::snprintf(buffer, sizeof buffer, format, args...);
    return buffer;
}

struct Settings {
    std::filesystem::path config_dir = MVSP_CONFIG_DIR;
    std::filesystem::path golden_dir = MVSP_GOLDEN_DIR;
    std::filesystem::path csv_dir;
    bool update_golden = false;
};

ExperimentResult run_config(const Settings& settings, const std::string& name) {
    const auto config = load_experiment_config(settings.config_dir / (name + ".json"));
    ExperimentResult result = run_experiment(config);
    if (!settings.csv_dir.empty()) {
        std::filesystem::create_directories(settings.csv_dir);
        write_text(settings.csv_dir / (name + ".csv"), to_csv(result));
    }
    return result;
}

std::size_t unsolved(const ExperimentResult& result) {
    return std::count_if(result.rows.begin(), result.rows.end(), [](const RunRecord& r) { return !r.solution; });
}

std::size_t exhausted(const ExperimentResult& result) {
    return std::count_if(result.rows.begin(), result.rows.end(),
                         [](const RunRecord& r) { return r.status == SolveStatus::budget_exhausted; });
}

Outcome oracle_equivalence() {
    int agree = 0, feasible = 0;
    double worst = 0.0;
    for (std::uint64_t seed = 1; seed <= 50; ++seed) {
        const Instance inst = testing::tiny_instance(seed);
        const auto exact = solve_exact(inst, SolveBudget{});
        const auto oracle = brute_force(inst);
        bool ok = exact.status == oracle.status && exact.solution.has_value() == oracle.solution.has_value();
        if (ok && oracle.solution) {
            ++feasible;
            const double diff = std::fabs(exact.best_objective - oracle.best_objective);
            worst = std::max(worst, diff);
            ok = diff <= kTol && check_feasibility(inst, *exact.solution).feasible() &&
                 check_feasibility(inst, *oracle.solution).feasible();
        }
        agree += ok;
    }
    return {agree == 50 && feasible > 0,
            fmt("%d/50 instances agree (%d feasible), max |diff| %.3g", agree, feasible, worst)};
}

Outcome linearization_fidelity() {
    std::mt19937_64 rng(2);
    int points = 0, agree = 0, corrupted = 0, caught = 0;
    double worst = 0.0;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const Instance inst = random_instance({3, 3, 2, 3}, seed, kSmallLoad);
        const MilpModel model = glover_linearize(inst);
        std::vector<std::size_t> ws;
        for (std::size_t c = 0; c < model.variables().size(); ++c)
            if (model.variables()[c].name[0] == 'w') ws.push_back(c);
        for (int k = 0; k < 10; ++k) {
            const auto s = testing::random_feasible(inst, rng);
            if (!s) continue;
            ++points;
            auto values = embed_solution(inst, model, *s);
            const auto eval = evaluate_milp(model, values);
            const double diff = std::fabs(eval.objective - objective(inst, *s));
            worst = std::max(worst, diff);
            agree += eval.feasible() && diff <= kTol;

            const std::size_t c = ws[rng() % ws.size()];
            values[c] += values[c] >= 1.0 ? -0.5 : 0.5;
            ++corrupted;
            for (const auto& row : evaluate_milp(model, values).violated)
                if (row.rfind("gx_", 0) == 0 || row.rfind("gn_", 0) == 0 || row.rfind("gl_", 0) == 0) {
                    ++caught;
                    break;
                }
        }
    }
    return {points == 100 && agree == 100 && caught == corrupted,
            fmt("%d/%d points agree (max |diff| %.3g), %d/%d corruptions caught", agree, points, worst, caught,
                corrupted)};
}

Outcome paranoid_lemma() {
    int checked = 0, held = 0;
    for (std::uint64_t seed = 1; checked < 20 && seed < 200; ++seed) {
        const Instance inst = testing::tiny_instance(seed);
        if (paranoid_space_size(inst) > kParanoidGuard) continue;
        ++checked;
        const auto minimal = brute_force(inst);
        const auto full = brute_force_paranoid(inst);
        held += minimal.status == full.status &&
                (!minimal.solution || full.best_objective >= minimal.best_objective - kTol);
    }
    return {checked == 20 && held == 20, fmt("%d/%d instances: extra replicas never improve", held, checked)};
}

Outcome colocation(const Settings& settings) {
    const auto result = run_config(settings, "colocation_sweep");
    std::map<std::pair<std::string, std::uint64_t>, std::map<int, double>> latency;
    for (const auto& row : result.rows)
        if (row.solution) latency[{row.load_class, row.seed}][row.max_replicas] = row.latency;

    std::map<std::string, std::vector<double>> drops;
    int violations = 0;
    for (const auto& [key, by_k] : latency) {
        double prev = INFINITY;
        for (const auto& [k, l] : by_k) {
            if (l > prev + kTol) ++violations;
            prev = l;
        }
        if (by_k.contains(1) && by_k.contains(4))
            drops[key.first].push_back((by_k.at(1) - by_k.at(4)) / by_k.at(1));
    }
    auto mean = [](const std::vector<double>& v) {
        double s = 0.0;
        for (double x : v) s += x;
        return v.empty() ? NAN : s / static_cast<double>(v.size());
    };
    const double low = mean(drops["low"]), high = mean(drops["high"]);
    const bool pass = unsolved(result) == 0 && low >= 0.15 && low <= 0.50 && high >= 0.05 && high <= 0.40 &&
                      violations == 0;
    return {pass, fmt("mean drop K=1->4: low %.3f [0.15, 0.50], high %.3f [0.05, 0.40]; %d K-monotonicity "
                      "violations; %zu unsolved, %zu budget-limited rows",
                      low, high, violations, unsolved(result), exhausted(result))};
}

Outcome load_sweep(const Settings& settings) {
    const auto result = run_config(settings, "load_sweep");
    std::map<std::uint64_t, std::vector<const RunRecord*>> by_seed;
    for (const auto& row : result.rows) by_seed[row.seed].push_back(&row);
    int monotone = 0, up = 0, knee = 0;
    for (auto& [seed, rows] : by_seed) {
        std::sort(rows.begin(), rows.end(), [](auto* a, auto* b) { return a->load_mean < b->load_mean; });
        bool mono = true;
        std::map<double, double> latency;
        for (std::size_t k = 0; k < rows.size(); ++k) {
            if (!rows[k]->solution) {
                mono = false;
                continue;
            }
            latency[rows[k]->load_mean] = rows[k]->latency;
            if (k > 0 && rows[k - 1]->solution &&
                (rows[k]->cost < rows[k - 1]->cost - kTol || rows[k]->utilization < rows[k - 1]->utilization - kTol))
                mono = false;
        }
        monotone += mono;
        if (latency.contains(5.5) && latency.contains(22.0) && latency.contains(33.0)) {
            up += latency[33.0] > latency[5.5];
            knee += latency[33.0] - latency[22.0] > latency[22.0] - latency[5.5];
        }
    }
    const int seeds = static_cast<int>(by_seed.size());
    return {seeds > 0 && monotone == seeds && up == seeds && knee >= 7,
            fmt("C and utilization non-decreasing for %d/%d seeds; L(33) > L(5.5) for %d/%d; knee for %d/%d (need 7); "
                "%zu budget-limited rows",
                monotone, seeds, up, seeds, knee, seeds, exhausted(result))};
}

Outcome alpha_sweep(const Settings& settings) {
    const auto result = run_config(settings, "alpha_sweep");
    std::map<std::uint64_t, std::vector<const RunRecord*>> by_seed;
    for (const auto& row : result.rows) by_seed[row.seed].push_back(&row);
    int pareto = 0, flat = 0;
    for (auto& [seed, rows] : by_seed) {
        std::sort(rows.begin(), rows.end(), [](auto* a, auto* b) { return a->alpha < b->alpha; });
        bool ok = true;
        std::map<double, double> latency;
        for (std::size_t k = 0; k < rows.size(); ++k) {
            if (!rows[k]->solution) {
                ok = false;
                continue;
            }
            latency[rows[k]->alpha] = rows[k]->latency;
            if (k > 0 && rows[k - 1]->solution &&
                (rows[k]->latency > rows[k - 1]->latency + kTol || rows[k]->cost < rows[k - 1]->cost - kTol))
                ok = false;
        }
        pareto += ok;
        if (latency.contains(0.2) && latency.contains(0.3))
            flat += std::fabs(latency[0.3] - latency[0.2]) <= 0.05 * latency[0.2];
    }
    const int seeds = static_cast<int>(by_seed.size());
    return {seeds > 0 && pareto == seeds && flat == seeds,
            fmt("L non-increasing and C non-decreasing for %d/%d seeds; |L(0.3) - L(0.2)| <= 5%% for %d/%d; "
                "%zu budget-limited rows",
                pareto, seeds, flat, seeds, exhausted(result))};
}

Outcome property_suites() {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    int failures = 0;
    const Instance tiny = testing::tiny_instance(3);
    const CostConfig& cost = tiny.params().cost;
    double worst_gap = 0.0;
    for (int t = 0; t < 1000; ++t) {
        const double a = unit(rng), b = unit(rng), lambda = unit(rng);
        const double mix = utilization_cost(tiny, lambda * a + (1 - lambda) * b);
        failures += mix > lambda * utilization_cost(tiny, a) + (1 - lambda) * utilization_cost(tiny, b) + 1e-12;
        const double y = utilization_cost(tiny, a);
        failures += y > cost.phi(a) + 1e-12;
        worst_gap = std::max(worst_gap, cost.phi(a) - y);
        failures += utilization_cost(tiny, std::min(a, b)) > utilization_cost(tiny, std::max(a, b));
    }
    failures += worst_gap >= 0.02;
    for (int t = 0; t < 1000; ++t) {
        const Instance inst = random_instance({3, 3, 2, 3}, 1 + t % 25, kSmallLoad);
        Solution s(inst);
        for (auto& n : s.n_values()) n = static_cast<int>(rng() % 3);
        const std::size_t e = rng() % inst.num_edge(), f = rng() % inst.total_variants();
        const double before = inference_latency(inst, s, e, f);
        s.n_values()[rng() % s.n_values().size()] += 1;
        failures += inference_latency(inst, s, e, f) < before;
    }
    int round_trips = 0;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const Instance inst = random_instance({4, 3, 2, 3}, seed, kSmallLoad);
        failures += !(random_instance({4, 3, 2, 3}, seed, kSmallLoad) == inst);
        failures += !(instance_from_json(instance_to_json(inst)) == inst);
        const Solution s = testing::random_assignment(inst, rng);
        failures += !solution_from_json(inst, solution_to_json(inst, s)).same_placement(s);
        const MilpModel model = glover_linearize(inst);
        std::stringstream mps;
        write_mps(model, mps);
        failures += !(read_mps(mps) == model);
        round_trips += 3;
    }
    return {failures == 0, fmt("3000 cost draws, 1000 latency draws, 10 determinism and %d round-trip checks; "
                               "%d failures, worst tangent gap %.4f",
                               round_trips, failures, worst_gap)};
}

Outcome table3_golden(const Settings& settings) {
    const auto csv = to_csv(run_config(settings, "table3"));
    const auto golden = settings.golden_dir / "table3.csv";
    if (settings.update_golden) {
        write_text(golden, csv);
        return {true, "golden file rewritten: " + golden.string()};
    }
    if (!std::filesystem::exists(golden)) return {false, "missing golden file " + golden.string()};
    const auto expected = read_text(golden);
    if (expected == csv) return {true, "emitted CSV matches " + golden.filename().string()};
    std::istringstream a(expected), b(csv);
    std::string la, lb;
    int line = 0;
    while (true) {
        ++line;
        const bool ga = static_cast<bool>(std::getline(a, la)), gb = static_cast<bool>(std::getline(b, lb));
        if (!ga || !gb || la != lb) break;
    }
    return {false, fmt("first difference at line %d: expected '%s', got '%s'", line, la.c_str(), lb.c_str())};
}

}  // namespace

int main(int argc, char** argv) {
    Settings settings;
    std::vector<int> only;
    CLI::App app{"Acceptance criteria"};
    app.add_option("--only", only, "Run only these criteria");
    app.add_option("--configs", settings.config_dir, "Experiment config directory");
    app.add_option("--golden", settings.golden_dir, "Golden file directory");
    app.add_option("--csv-dir", settings.csv_dir, "Also write each experiment CSV here");
    app.add_flag("--update-golden", settings.update_golden, "Rewrite the golden file instead of comparing");
    CLI11_PARSE(app, argc, argv);

    const std::vector<Criterion> criteria = {
        {1, "oracle equivalence", 10, oracle_equivalence},
        {2, "linearization fidelity", 5, linearization_fidelity},
        {3, "minimal replicas lemma", 30, paranoid_lemma},
        {4, "co-location sweep", 300, [&] { return colocation(settings); }},
        {5, "load sweep", 300, [&] { return load_sweep(settings); }},
        {6, "alpha sweep", 300, [&] { return alpha_sweep(settings); }},
        {7, "property suites", 10, property_suites},
        {8, "table3 golden regression", 0, [&] { return table3_golden(settings); }},
    };

    int failed = 0;
    for (const auto& c : criteria) {
        if (!only.empty() && std::find(only.begin(), only.end(), c.id) == only.end()) continue;
        const auto start = std::chrono::steady_clock::now();
        Outcome outcome;
        try {
            outcome = c.check();
        } catch (const std::exception& e) {
            outcome = {false, std::string("error: ") + e.what()};
        }
        const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        const bool in_time = c.time_limit <= 0 || seconds <= c.time_limit;
        const bool pass = outcome.pass && in_time;
        failed += !pass;
        std::string timing = fmt("%.1f s", seconds);
        if (c.time_limit > 0) timing += fmt(" of %.0f s", c.time_limit);
        std::printf("%s %d %s: %s (%s)\n", pass ? "PASS" : "FAIL", c.id, c.name.c_str(), outcome.detail.c_str(),
                    timing.c_str());
        std::fflush(stdout);
    }
    return failed == 0 ? 0 : 1;
}
