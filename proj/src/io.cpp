#include "mvsp/io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "mvsp/errors.hpp"

namespace mvsp {

namespace {

using Json = nlohmann::ordered_json;

Json parse(std::string_view text) {
    try {
        return Json::parse(text.begin(), text.end());
    } catch (const Json::parse_error& e) {
        throw ParseError(std::string("malformed document: ") + e.what());
    }
}

const Json& field(const Json& j, const char* key, const std::string& path) {
    if (!j.is_object()) throw ValidationError(path, "expected an object");
    auto it = j.find(key);
    if (it == j.end()) throw ValidationError(path.empty() ? key : path + "." + key, "missing field");
    return *it;
}

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

template <typename T>
T value_of(const Json& j, const std::string& path) {
    try {
        return j.get<T>();
    } catch (const Json::exception&) {
        throw ValidationError(path, "wrong type");
    }
}

template <typename T>
T get(const Json& j, const char* key, const std::string& path) {
    return value_of<T>(field(j, key, path), join(path, key));
}

template <typename T>
T get_or(const Json& j, const char* key, const std::string& path, T fallback) {
    if (!j.is_object() || !j.contains(key)) return fallback;
    return get<T>(j, key, path);
}

const Json& array_field(const Json& j, const char* key, const std::string& path) {
    const Json& a = field(j, key, path);
    if (!a.is_array()) throw ValidationError(join(path, key), "expected a list");
    return a;
}

std::string at(const std::string& path, std::size_t k) { return path + "[" + std::to_string(k) + "]"; }

Json number_or_null(double value) { return std::isfinite(value) ? Json(value) : Json(nullptr); }

std::size_t variant_index(const Json& j, const std::string& path, const Instance& instance, std::size_t model) {
    const auto v = get<std::size_t>(j, "variant", path);
    if (v < 1 || v > instance.num_variants(model)) throw ValidationError(join(path, "variant"), "out of range");
    return v - 1;
}

template <typename Fn>
auto lookup(const std::string& path, Fn&& fn) {
    try {
        return fn();
    } catch (const LookupError& e) {
        throw ValidationError(path, e.what());
    }
}

Json solution_body(const Instance& instance, const Solution& solution) {
    const auto& topo = instance.topology();
    Json x = Json::array();
    for (std::size_t i = 0; i < instance.num_iot(); ++i)
        for (std::size_t e = 0; e < instance.num_edge(); ++e)
            for (std::size_t f = 0; f < instance.total_variants(); ++f)
                if (solution.x(i, e, f)) {
                    const auto [m, v] = instance.variant_key(f);
                    x.push_back({{"iot", topo.iot_nodes[i]},
                                 {"edge", topo.edge_nodes[e]},
                                 {"model", instance.catalog().models[m].name},
                                 {"variant", v + 1}});
                }
    Json n = Json::array();
    for (std::size_t e = 0; e < instance.num_edge(); ++e)
        for (std::size_t f = 0; f < instance.total_variants(); ++f)
            if (solution.n(e, f) != 0) {
                const auto [m, v] = instance.variant_key(f);
                n.push_back({{"edge", topo.edge_nodes[e]},
                             {"model", instance.catalog().models[m].name},
                             {"variant", v + 1},
                             {"count", solution.n(e, f)}});
            }
    Json z = Json::object();
    for (std::size_t e = 0; e < instance.num_edge(); ++e)
        z[topo.edge_nodes[e]] = utilization_cost(instance, node_utilization(instance, solution, e));
    return {{"x", x}, {"n", n}, {"z", z}};
}

}  // namespace

std::string instance_to_json(const Instance& instance) {
    const auto& topo = instance.topology();
    Json links = Json::array();
    for (const auto& link : topo.links) links.push_back({{"from", link.from}, {"to", link.to}, {"delay", link.delay}});
    Json capacity = Json::object();
    for (const auto& id : topo.edge_nodes) capacity[id] = topo.capacity.at(id);

    Json models = Json::array();
    for (const auto& model : instance.catalog().models) {
        Json variants = Json::array();
        for (const auto& variant : model.variants) {
            Json latency = Json::object();
            for (const auto& id : topo.edge_nodes) latency[id] = variant.base_latency.at(id);
            variants.push_back({{"memory_req", variant.memory_req},
                                {"max_load", variant.max_load},
                                {"base_latency", latency},
                                {"interference_coeff", variant.interference_coeff}});
        }
        models.push_back({{"name", model.name}, {"variants", variants}});
    }

    Json entries = Json::array();
    for (const auto& entry : instance.demand().entries)
        entries.push_back(
            {{"iot", entry.iot}, {"model", entry.model}, {"rate", entry.rate}, {"latency_req", entry.latency_req}});

    const auto& p = instance.params();
    Json params = {{"objective_weight", p.objective_weight},
                   {"max_replicas", p.max_replicas},
                   {"round_trip", p.round_trip},
                   {"replica_cap_mode", p.replica_cap_mode == ReplicaCapMode::aggregate ? "aggregate" : "per_variant"},
                   {"cost", {{"steepness", p.cost.steepness}, {"tangent_points", p.cost.tangent_points}}}};
    if (!p.cost.explicit_tangents.empty()) {
        Json tangents = Json::array();
        for (const auto& y : p.cost.explicit_tangents) tangents.push_back({{"slope", y.slope}, {"intercept", y.intercept}});
        params["cost_tangents"] = tangents;
    }

    Json doc = {{"topology",
                 {{"iot_nodes", topo.iot_nodes}, {"edge_nodes", topo.edge_nodes}, {"links", links}, {"capacity", capacity}}},
                {"catalog", {{"models", models}}},
                {"demand", {{"entries", entries}}},
                {"params", params}};
    return doc.dump(2) + "\n";
}

Instance instance_from_json(std::string_view text) {
    const Json doc = parse(text);

    Topology topo;
    const Json& t = field(doc, "topology", "");
    topo.iot_nodes = get<std::vector<std::string>>(t, "iot_nodes", "topology");
    topo.edge_nodes = get<std::vector<std::string>>(t, "edge_nodes", "topology");
    const Json& links = array_field(t, "links", "topology");
    for (std::size_t k = 0; k < links.size(); ++k) {
        const auto path = at("topology.links", k);
        topo.links.push_back(
            {get<std::string>(links[k], "from", path), get<std::string>(links[k], "to", path), get<double>(links[k], "delay", path)});
    }
    topo.capacity = get<std::map<std::string, double>>(t, "capacity", "topology");

    VariantCatalog catalog;
    const Json& models = array_field(field(doc, "catalog", ""), "models", "catalog");
    for (std::size_t m = 0; m < models.size(); ++m) {
        const auto path = at("catalog.models", m);
        Model model{get<std::string>(models[m], "name", path), {}};
        const Json& variants = array_field(models[m], "variants", path);
        for (std::size_t v = 0; v < variants.size(); ++v) {
            const auto vpath = at(path + ".variants", v);
            const Json& j = variants[v];
            model.variants.push_back({get<double>(j, "memory_req", vpath), get<double>(j, "max_load", vpath),
                                      get<std::map<std::string, double>>(j, "base_latency", vpath),
                                      get<double>(j, "interference_coeff", vpath)});
        }
        catalog.models.push_back(std::move(model));
    }

    DemandMatrix demand;
    const Json& entries = array_field(field(doc, "demand", ""), "entries", "demand");
    for (std::size_t k = 0; k < entries.size(); ++k) {
        const auto path = at("demand.entries", k);
        const Json& j = entries[k];
        demand.entries.push_back({get<std::string>(j, "iot", path), get<std::string>(j, "model", path),
                                  get<double>(j, "rate", path), get<double>(j, "latency_req", path)});
    }

    Params params;
    if (doc.contains("params")) {
        const Json& p = doc["params"];
        params.objective_weight = get_or(p, "objective_weight", "params", params.objective_weight);
        params.max_replicas = get_or(p, "max_replicas", "params", params.max_replicas);
        params.round_trip = get_or(p, "round_trip", "params", params.round_trip);
        const auto mode = get_or<std::string>(p, "replica_cap_mode", "params", "per_variant");
        if (mode == "aggregate")
            params.replica_cap_mode = ReplicaCapMode::aggregate;
        else if (mode != "per_variant")
            throw ValidationError("params.replica_cap_mode", "expected 'per_variant' or 'aggregate'");
        if (p.contains("cost")) {
            params.cost.steepness = get_or(p["cost"], "steepness", "params.cost", params.cost.steepness);
            params.cost.tangent_points = get_or(p["cost"], "tangent_points", "params.cost", params.cost.tangent_points);
        }
        if (p.contains("cost_tangents")) {
            const Json& tangents = array_field(p, "cost_tangents", "params");
            for (std::size_t k = 0; k < tangents.size(); ++k) {
                const auto path = at("params.cost_tangents", k);
                params.cost.explicit_tangents.push_back(
                    {get<double>(tangents[k], "slope", path), get<double>(tangents[k], "intercept", path)});
            }
            if (params.cost.explicit_tangents.empty())
                throw ValidationError("params.cost_tangents", "tangent set is empty");
        }
    }

    return Instance::build(std::move(topo), std::move(catalog), std::move(demand), std::move(params));
}

void save_instance(const Instance& instance, const std::filesystem::path& path) {
    write_text(path, instance_to_json(instance));
}

Instance load_instance(const std::filesystem::path& path) { return instance_from_json(read_text(path)); }

std::string solution_to_json(const Instance& instance, const Solution& solution) {
    return solution_body(instance, solution).dump(2) + "\n";
}

Solution solution_from_json(const Instance& instance, std::string_view text) {
    const Json doc = parse(text);
    Solution solution(instance);
    const Json& xs = array_field(doc, "x", "");
    for (std::size_t k = 0; k < xs.size(); ++k) {
        const auto path = at("x", k);
        const auto i = lookup(path + ".iot", [&] { return instance.iot_index(get<std::string>(xs[k], "iot", path)); });
        const auto e = lookup(path + ".edge", [&] { return instance.edge_index(get<std::string>(xs[k], "edge", path)); });
        const auto m = lookup(path + ".model", [&] { return instance.model_index(get<std::string>(xs[k], "model", path)); });
        solution.set_x(i, e, instance.flat_variant(m, variant_index(xs[k], path, instance, m)), true);
    }
    const Json& ns = array_field(doc, "n", "");
    for (std::size_t k = 0; k < ns.size(); ++k) {
        const auto path = at("n", k);
        const auto e = lookup(path + ".edge", [&] { return instance.edge_index(get<std::string>(ns[k], "edge", path)); });
        const auto m = lookup(path + ".model", [&] { return instance.model_index(get<std::string>(ns[k], "model", path)); });
        solution.set_n(e, instance.flat_variant(m, variant_index(ns[k], path, instance, m)), get<int>(ns[k], "count", path));
    }
    fill_costs(instance, solution);
    return solution;
}

std::string report_to_json(const Instance& instance, const FeasibilityReport& report) {
    const auto& topo = instance.topology();
    Json violations = Json::array();
    for (const auto& v : report.violations) {
        Json where = Json::object();
        if (v.where.iot >= 0) where["iot"] = topo.iot_nodes[static_cast<std::size_t>(v.where.iot)];
        if (v.where.edge >= 0) where["edge"] = topo.edge_nodes[static_cast<std::size_t>(v.where.edge)];
        if (v.where.model >= 0) where["model"] = instance.catalog().models[static_cast<std::size_t>(v.where.model)].name;
        if (v.where.variant >= 0) where["variant"] = v.where.variant + 1;
        violations.push_back({{"constraint", std::string(to_string(v.constraint))}, {"location", where}, {"magnitude", v.magnitude}});
    }
    Json doc = {{"feasible", report.feasible()}, {"violations", violations}};
    return doc.dump(2) + "\n";
}

FeasibilityReport report_from_json(const Instance& instance, std::string_view text) {
    const Json doc = parse(text);
    FeasibilityReport report;
    const Json& violations = array_field(doc, "violations", "");
    for (std::size_t k = 0; k < violations.size(); ++k) {
        const auto path = at("violations", k);
        const Json& j = violations[k];
        const Json& loc = field(j, "location", path);
        Location where;
        if (loc.contains("iot")) where.iot = static_cast<int>(instance.iot_index(loc["iot"].get<std::string>()));
        if (loc.contains("edge")) where.edge = static_cast<int>(instance.edge_index(loc["edge"].get<std::string>()));
        if (loc.contains("model")) where.model = static_cast<int>(instance.model_index(loc["model"].get<std::string>()));
        if (loc.contains("variant")) where.variant = loc["variant"].get<int>() - 1;
        report.violations.push_back(
            {constraint_from_string(get<std::string>(j, "constraint", path)), where, get<double>(j, "magnitude", path)});
    }
    return report;
}

std::string result_to_json(const Instance& instance, const SolveResult& result) {
    Json meta = {{"status", std::string(to_string(result.status))},
                 {"best_objective", number_or_null(result.best_objective)},
                 {"lower_bound", number_or_null(result.lower_bound)},
                 {"nodes_explored", result.nodes_explored},
                 {"elapsed_seconds", result.elapsed_seconds}};
    Json doc;
    if (result.solution) {
        meta["average_latency"] = average_latency(instance, *result.solution);
        meta["average_cost"] = average_cost(instance, *result.solution);
        doc = solution_body(instance, *result.solution);
    } else {
        doc = {{"x", Json::array()}, {"n", Json::array()}, {"z", Json::object()}};
    }
    Json out = {{"metadata", meta}};
    for (auto& [key, value] : doc.items()) out[key] = value;
    return out.dump(2) + "\n";
}

CatalogTemplate parse_catalog_template(std::string_view text) {
    const Json doc = parse(text);
    CatalogTemplate catalog;
    catalog.node_speed_spread = get_or(doc, "node_speed_spread", "", catalog.node_speed_spread);
    const Json& models = array_field(doc, "models", "");
    for (std::size_t m = 0; m < models.size(); ++m) {
        const auto path = at("models", m);
        ModelTemplate model{get<std::string>(models[m], "name", path), {}};
        const Json& variants = array_field(models[m], "variants", path);
        for (std::size_t v = 0; v < variants.size(); ++v) {
            const auto vpath = at(path + ".variants", v);
            const Json& j = variants[v];
            model.variants.push_back({get<int>(j, "batch", vpath), get<double>(j, "latency", vpath),
                                      get<double>(j, "memory", vpath), get<double>(j, "max_load", vpath)});
        }
        catalog.models.push_back(std::move(model));
    }
    return catalog;
}

std::string catalog_template_to_json(const CatalogTemplate& catalog) {
    Json models = Json::array();
    for (const auto& model : catalog.models) {
        Json variants = Json::array();
        for (const auto& v : model.variants)
            variants.push_back({{"batch", v.batch}, {"latency", v.latency}, {"memory", v.memory}, {"max_load", v.max_load}});
        models.push_back({{"name", model.name}, {"variants", variants}});
    }
    Json doc = {{"node_speed_spread", catalog.node_speed_spread}, {"models", models}};
    return doc.dump(2) + "\n";
}

std::string read_text(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path.string() + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

void write_text(const std::filesystem::path& path, std::string_view text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    out << text;
    out.flush();
    if (!out) throw IoError("failed writing '" + path.string() + "'");
}

}  // namespace mvsp
