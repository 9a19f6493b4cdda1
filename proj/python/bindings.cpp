#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

#include "mvsp/errors.hpp"
#include "mvsp/experiments.hpp"
#include "mvsp/io.hpp"
#include "mvsp/linearize.hpp"
#include "mvsp/oracle.hpp"
#include "mvsp/solver.hpp"

namespace py = pybind11;
using namespace mvsp;

namespace {

py::dict report_dict(const Instance& instance, const FeasibilityReport& report) {
    py::list violations;
    for (const auto& v : report.violations) {
        py::dict d;
        d["constraint"] = std::string(to_string(v.constraint));
        if (v.where.iot >= 0) d["iot"] = instance.topology().iot_nodes[v.where.iot];
        if (v.where.edge >= 0) d["edge"] = instance.topology().edge_nodes[v.where.edge];
        if (v.where.model >= 0) d["model"] = instance.catalog().models[v.where.model].name;
        if (v.where.variant >= 0) d["variant"] = v.where.variant + 1;
        d["magnitude"] = v.magnitude;
        violations.append(d);
    }
    py::dict out;
    out["feasible"] = report.feasible();
    out["violations"] = violations;
    return out;
}

SolveResult solve(const Instance& instance, const std::string& method, std::uint64_t max_nodes, double time_limit,
                  double gap) {
    if (method == "heuristic") return solve_heuristic(instance);
    if (method == "oracle") return brute_force(instance);
    if (method != "exact") throw ConfigError("unknown method '" + method + "'");
    SolveBudget budget;
    budget.max_nodes = max_nodes;
    budget.wall_time_limit = time_limit;
    budget.optimality_gap_target = gap;
    return solve_exact(instance, budget);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Model-variant selection and placement";

    auto base = py::register_exception<Error>(m, "Error");
    py::register_exception<ValidationError>(m, "ValidationError", base.ptr());
    py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
    py::register_exception<ParseError>(m, "ParseError", base.ptr());
    py::register_exception<IntegrityError>(m, "IntegrityError", base.ptr());
    py::register_exception<IoError>(m, "IoError", base.ptr());
    py::register_exception<SearchSpaceError>(m, "SearchSpaceError", base.ptr());

    py::class_<Instance>(m, "Instance")
        .def_static("from_json", &instance_from_json, py::arg("text"))
        .def_static("load", &load_instance, py::arg("path"))
        .def_static(
            "random",
            [](std::tuple<std::size_t, std::size_t, std::size_t, std::size_t> shape, std::uint64_t seed,
               double load_mean, double link_delay_mean) {
                const auto [a, b, c, d] = shape;
                return random_instance({a, b, c, d}, seed, load_mean, link_delay_mean);
            },
            py::arg("shape"), py::arg("seed"), py::arg("load_mean") = 5.5, py::arg("link_delay_mean") = 12.23)
        .def("to_json", &instance_to_json)
        .def("save", &save_instance, py::arg("path"))
        .def_property_readonly("iot_nodes", [](const Instance& i) { return i.topology().iot_nodes; })
        .def_property_readonly("edge_nodes", [](const Instance& i) { return i.topology().edge_nodes; })
        .def_property_readonly("models",
                               [](const Instance& i) {
                                   std::vector<std::string> names;
                                   for (const auto& model : i.catalog().models) names.push_back(model.name);
                                   return names;
                               })
        .def_property_readonly("objective_weight", &Instance::objective_weight)
        .def_property_readonly("max_replicas", &Instance::max_replicas)
        .def("comm_latency",
             [](const Instance& i, const std::string& iot, const std::string& edge) {
                 return i.comm_latency(i.iot_index(iot), i.edge_index(edge));
             })
        .def("__eq__", [](const Instance& a, const Instance& b) { return a == b; });

    py::class_<Solution>(m, "Solution")
        .def_static("from_json", &solution_from_json, py::arg("instance"), py::arg("text"))
        .def("to_json", [](const Solution& s, const Instance& i) { return solution_to_json(i, s); }, py::arg("instance"))
        .def_property_readonly("z", &Solution::z_values);

    m.def("objective", &objective, py::arg("instance"), py::arg("solution"));
    m.def("average_latency", &average_latency, py::arg("instance"), py::arg("solution"));
    m.def(
        "average_cost", [](const Instance& i, const Solution& s) { return average_cost(i, s); }, py::arg("instance"),
        py::arg("solution"));
    m.def("check_feasibility",
          [](const Instance& i, const Solution& s) { return report_dict(i, check_feasibility(i, s)); },
          py::arg("instance"), py::arg("solution"));

    m.def(
        "solve",
        [](const Instance& instance, const std::string& method, std::uint64_t max_nodes, double time_limit,
           double gap) {
            SolveResult result;
            {
                py::gil_scoped_release release;
                result = solve(instance, method, max_nodes, time_limit, gap);
            }
            py::dict out;
            out["status"] = std::string(to_string(result.status));
            out["objective"] = result.best_objective;
            out["lower_bound"] = result.lower_bound;
            out["nodes"] = result.nodes_explored;
            out["seconds"] = result.elapsed_seconds;
            out["solution"] = result.solution ? py::cast(*result.solution) : py::none();
            return out;
        },
        py::arg("instance"), py::arg("method") = "exact", py::arg("max_nodes") = 10'000'000,
        py::arg("time_limit") = std::numeric_limits<double>::infinity(), py::arg("gap") = 0.0);

    m.def(
        "export_mps",
        [](const Instance& instance, const std::filesystem::path& path) {
            const MilpModel model = glover_linearize(instance);
            export_interchange(model, path);
            return model.variables().size();
        },
        py::arg("instance"), py::arg("path"), "Writes the linearized model; returns the column count.");
    m.def(
        "column_names",
        [](const Instance& instance) {
            const MilpModel model = glover_linearize(instance);
            std::vector<std::string> names;
            for (const auto& v : model.variables()) names.push_back(v.name);
            return names;
        },
        py::arg("instance"));
    m.def(
        "import_values",
        [](const Instance& instance, const std::vector<std::pair<std::string, double>>& values) {
            std::ostringstream text;
            text.precision(17);
            for (const auto& [name, value] : values) text << name << ' ' << value << '\n';
            std::istringstream in(text.str());
            auto imported = import_solution(instance, glover_linearize(instance), in);
            return py::make_tuple(imported.solution, report_dict(instance, imported.report));
        },
        py::arg("instance"), py::arg("values"),
        "Maps (column name, value) pairs back to a solution; returns (solution, report).");

    m.def(
        "run_experiment",
        [](const std::filesystem::path& config_path) {
            const auto config = load_experiment_config(config_path);
            py::gil_scoped_release release;
            return to_csv(run_experiment(config));
        },
        py::arg("config"), "Runs an experiment config file and returns its CSV text.");
}
