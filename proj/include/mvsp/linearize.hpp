#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "mvsp/formulation.hpp"
#include "mvsp/instance.hpp"

namespace mvsp {

enum class VarKind { binary, integer, continuous };
enum class Sense { le, ge, eq };

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

struct MilpVariable {
    std::string name;
    VarKind kind = VarKind::continuous;
    double lower = 0.0;
    double upper = kInfinity;

    bool operator==(const MilpVariable&) const = default;
};

using SparseVector = std::vector<std::pair<std::size_t, double>>;

struct MilpRow {
    std::string name;
    SparseVector coefficients;
    Sense sense = Sense::le;
    double rhs = 0.0;

    bool operator==(const MilpRow&) const = default;
};

/// Linear model, minimization. Column order is insertion order.
class MilpModel {
public:
    std::string name = "MVSP";

    std::size_t add_variable(std::string var_name, VarKind kind, double lower, double upper);
    std::size_t add_row(std::string row_name, SparseVector coefficients, Sense sense, double rhs);
    void set_objective(SparseVector coefficients, double constant = 0.0);

    const std::vector<MilpVariable>& variables() const noexcept { return variables_; }
    const std::vector<MilpRow>& rows() const noexcept { return rows_; }
    const SparseVector& objective() const noexcept { return objective_; }
    double objective_constant() const noexcept { return objective_constant_; }

    std::optional<std::size_t> find(const std::string& var_name) const;
    std::size_t count(VarKind kind) const;
    std::size_t count_prefix(const std::string& prefix) const;

    /// Same variables, rows and objective (the name-index is derived).
    bool operator==(const MilpModel& other) const {
        return variables_ == other.variables_ && rows_ == other.rows_ && objective_ == other.objective_ &&
               objective_constant_ == other.objective_constant_;
    }

private:
    std::vector<MilpVariable> variables_;
    std::vector<MilpRow> rows_;
    SparseVector objective_;
    double objective_constant_ = 0.0;
    std::unordered_map<std::string, std::size_t> index_;
};

/// Stable column names: x_i.e.m.v, n_e.m.v, w_i.e.m.v.m2.v2, z_e (one-based indices).
std::string x_name(std::size_t i, std::size_t e, std::size_t m, std::size_t v);
std::string n_name(std::size_t e, std::size_t m, std::size_t v);
std::string w_name(std::size_t i, std::size_t e, std::size_t m, std::size_t v, std::size_t m2, std::size_t v2);
std::string z_name(std::size_t e);

/// Exact MILP equivalent of the quadratic placement problem.
///
/// Every product x[i,e,m,v] * n[e,m2,v2] with a nonzero coefficient (r_m^i > 0) is replaced
/// by a continuous w in [0, K] with w <= K x, w <= n, w >= n - K (1 - x). Utilization is
/// substituted into the tangent rows; u_e <= 1 is the memory row. x columns of undemanded
/// pairs and unreachable nodes are fixed to zero.
MilpModel glover_linearize(const Instance& instance);

/// Closed-form column count of glover_linearize for the instance.
std::size_t expected_variable_count(const Instance& instance);

struct MilpEvaluation {
    double objective = 0.0;
    std::vector<std::string> violated;  // row names, or "bound:<col>" / "integrality:<col>"

    bool feasible() const noexcept { return violated.empty(); }
};

MilpEvaluation evaluate_milp(const MilpModel& model, std::span<const double> values, double tolerance = 1e-9);

/// Full column assignment for a solution: x and n verbatim, w = x * n, z = cost(u).
std::vector<double> embed_solution(const Instance& instance, const MilpModel& model, const Solution& solution);

/// Fixed-column MPS. Names longer than eight characters widen their field; such files are
/// read back by any free-format MPS reader.
void write_mps(const MilpModel& model, std::ostream& out);
MilpModel read_mps(std::istream& in);

/// Throws IoError when the file cannot be written.
void export_interchange(const MilpModel& model, const std::filesystem::path& path);
MilpModel import_interchange(const std::filesystem::path& path);

struct ImportedSolution {
    Solution solution;
    FeasibilityReport report;
};

/// Reads whitespace-separated `name value` pairs (blank lines and `#` comments skipped).
/// Binary and integer values are rounded when within 1e-6 of an integer; anything else, or a
/// value more than 1e-6 outside its bounds, raises IntegrityError. Unknown names raise
/// ParseError. Columns not listed are zero.
ImportedSolution import_solution(const Instance& instance, const MilpModel& model, std::istream& in);
ImportedSolution import_solution(const Instance& instance, const MilpModel& model,
                                 const std::filesystem::path& path);

}  // namespace mvsp
