#include "cli.hpp"

#include <CLI11.hpp>
#include <ostream>
#include <sstream>

#include "mvsp/errors.hpp"
#include "mvsp/experiments.hpp"
#include "mvsp/generator.hpp"
#include "mvsp/io.hpp"
#include "mvsp/linearize.hpp"
#include "mvsp/oracle.hpp"
#include "mvsp/solver.hpp"

namespace mvsp::cli {

namespace {

void emit(const std::string& path, const std::string& text, std::ostream& out) {
    if (path.empty() || path == "-")
        out << text;
    else
        write_text(path, text);
}

struct SolveArgs {
    std::string instance;
    std::string output;
    bool exact = false;
    bool heuristic = false;
    bool oracle = false;
    double budget = 1e7;
    double time_limit = std::numeric_limits<double>::infinity();
    double gap = 0.0;
};

int solve(const SolveArgs& a, std::ostream& out, std::ostream& err) {
    const Instance instance = load_instance(a.instance);
    SolveResult result;
    if (a.oracle) {
        result = brute_force(instance);
    } else if (a.heuristic) {
        result = solve_heuristic(instance);
    } else {
        SolveBudget budget;
        budget.max_nodes = static_cast<std::uint64_t>(a.budget);
        budget.wall_time_limit = a.time_limit;
        budget.optimality_gap_target = a.gap;
        budget.validate();
        result = solve_exact(instance, budget);
    }
    emit(a.output, result_to_json(instance, result), out);
    err << "status: " << to_string(result.status) << ", objective: " << format_number(result.best_objective)
        << ", nodes: " << result.nodes_explored << "\n";
    if (result.status == SolveStatus::infeasible) return kInfeasible;
    if (!result.solution) return kNoIncumbent;
    return kSuccess;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Model-variant selection and placement on edge networks", "mvsp"};
    app.require_subcommand(1);

    SolveArgs solve_args;
    auto* solve_cmd = app.add_subcommand("solve", "Solve an instance and write the solution document");
    solve_cmd->add_option("instance", solve_args.instance, "Instance file")->required()->check(CLI::ExistingFile);
    solve_cmd->add_option("-o,--output", solve_args.output, "Solution file (default: stdout)");
    auto* exact = solve_cmd->add_flag("--exact", solve_args.exact, "Branch-and-bound (default)");
    auto* heuristic = solve_cmd->add_flag("--heuristic", solve_args.heuristic, "Greedy plus local search");
    auto* oracle = solve_cmd->add_flag("--oracle", solve_args.oracle, "Exhaustive enumeration (tiny instances)");
    exact->excludes(heuristic, oracle);
    heuristic->excludes(oracle);
    solve_cmd->add_option("--budget", solve_args.budget, "Maximum branch-and-bound nodes")->check(CLI::PositiveNumber);
    solve_cmd->add_option("--time", solve_args.time_limit, "Wall-time limit in seconds")->check(CLI::PositiveNumber);
    solve_cmd->add_option("--gap", solve_args.gap, "Relative optimality gap target")->check(CLI::NonNegativeNumber);

    std::string lint_path;
    auto* lint_cmd = app.add_subcommand("lint", "Validate an instance file");
    lint_cmd->add_option("instance", lint_path, "Instance file")->required()->check(CLI::ExistingFile);

    std::string export_instance, export_output;
    auto* export_cmd = app.add_subcommand("export", "Write the linearized model as an MPS file");
    export_cmd->add_option("instance", export_instance, "Instance file")->required()->check(CLI::ExistingFile);
    export_cmd->add_option("-o,--output", export_output, "MPS file")->required();

    std::string import_instance, import_values, import_output, import_report;
    auto* import_cmd = app.add_subcommand("import", "Map an external solver's variable values back to a solution");
    import_cmd->add_option("instance", import_instance, "Instance file")->required()->check(CLI::ExistingFile);
    import_cmd->add_option("values", import_values, "Whitespace-separated name/value pairs")
        ->required()
        ->check(CLI::ExistingFile);
    import_cmd->add_option("-o,--output", import_output, "Solution file (default: stdout)");
    import_cmd->add_option("--report", import_report, "Feasibility report file");

    std::string experiment_path, experiment_output;
    auto* experiment_cmd = app.add_subcommand("experiment", "Run an experiment config and write its CSV");
    experiment_cmd->add_option("config", experiment_path, "Experiment config file")->required()->check(CLI::ExistingFile);
    experiment_cmd->add_option("-o,--output", experiment_output, "CSV file (overrides the config)");

    std::vector<std::size_t> shape;
    std::uint64_t gen_seed = 1;
    double gen_load = 5.5, gen_delay = 12.23;
    std::string gen_output;
    auto* generate_cmd = app.add_subcommand("generate", "Write a seeded random instance");
    generate_cmd->add_option("--shape", shape, "iot,edge,models,variants")->required()->expected(4)->delimiter(',');
    generate_cmd->add_option("--seed", gen_seed, "Seed");
    generate_cmd->add_option("--load-mean", gen_load, "Mean request rate E(r)");
    generate_cmd->add_option("--link-delay-mean", gen_delay, "Mean link delay in ms");
    generate_cmd->add_option("-o,--output", gen_output, "Instance file (default: stdout)");

    std::vector<std::string> argv_store{"mvsp"};
    argv_store.insert(argv_store.end(), args.begin(), args.end());
    std::vector<char*> argv;
    for (auto& s : argv_store) argv.push_back(s.data());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kSuccess;
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << "\n";
        if (const auto* sub = app.get_subcommands().empty() ? &app : app.get_subcommands().front())
            err << sub->help();
        return kUsage;
    }

    try {
        if (*solve_cmd) return solve(solve_args, out, err);

        if (*lint_cmd) {
            const Instance instance = load_instance(lint_path);
            out << "ok: " << instance.num_iot() << " iot nodes, " << instance.num_edge() << " edge nodes, "
                << instance.num_models() << " models, " << instance.total_variants() << " variants\n";
            return kSuccess;
        }

        if (*export_cmd) {
            const Instance instance = load_instance(export_instance);
            const MilpModel model = glover_linearize(instance);
            export_interchange(model, export_output);
            err << model.variables().size() << " columns, " << model.rows().size() << " rows\n";
            return kSuccess;
        }

        if (*import_cmd) {
            const Instance instance = load_instance(import_instance);
            const ImportedSolution imported = import_solution(instance, glover_linearize(instance), import_values);
            emit(import_output, solution_to_json(instance, imported.solution), out);
            if (!import_report.empty()) write_text(import_report, report_to_json(instance, imported.report));
            if (!imported.report.feasible()) {
                err << imported.report.violations.size() << " constraint violations\n";
                return kInfeasible;
            }
            return kSuccess;
        }

        if (*experiment_cmd) {
            ExperimentConfig config = load_experiment_config(experiment_path);
            if (!experiment_output.empty()) config.output = experiment_output;
            const ExperimentResult result = run_experiment(config);
            emit(config.output.string(), to_csv(result), out);
            return kSuccess;
        }

        if (*generate_cmd) {
            const Instance instance =
                random_instance({shape[0], shape[1], shape[2], shape[3]}, gen_seed, gen_load, gen_delay);
            emit(gen_output, instance_to_json(instance), out);
            return kSuccess;
        }
    } catch (const ValidationError& e) {
        err << "validation error: " << e.what() << "\n";
        return kUsage;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return kUsage;
    }
    return kUsage;
}

}  // namespace mvsp::cli
