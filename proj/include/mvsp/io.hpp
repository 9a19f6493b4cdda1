#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "mvsp/formulation.hpp"
#include "mvsp/generator.hpp"
#include "mvsp/instance.hpp"
#include "mvsp/solver.hpp"

namespace mvsp {

/// Instance documents: JSON with top-level sections topology / catalog / demand / params.
/// See docs/file_formats.md for the schema.
std::string instance_to_json(const Instance& instance);
Instance instance_from_json(std::string_view text);

void save_instance(const Instance& instance, const std::filesystem::path& path);
Instance load_instance(const std::filesystem::path& path);

/// Sparse solution document: only x = 1 and n > 0 entries, identified by node ids, model
/// names and one-based variant indices.
std::string solution_to_json(const Instance& instance, const Solution& solution);
Solution solution_from_json(const Instance& instance, std::string_view text);

std::string report_to_json(const Instance& instance, const FeasibilityReport& report);
FeasibilityReport report_from_json(const Instance& instance, std::string_view text);

/// Solution document plus a `metadata` header (status, bounds, nodes, time). A result
/// without a solution carries empty x and n lists.
std::string result_to_json(const Instance& instance, const SolveResult& result);

CatalogTemplate parse_catalog_template(std::string_view text);
std::string catalog_template_to_json(const CatalogTemplate& catalog);

std::string read_text(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, std::string_view text);

}  // namespace mvsp
