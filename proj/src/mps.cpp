#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include "mvsp/errors.hpp"
#include "mvsp/linearize.hpp"

namespace mvsp {

namespace {

constexpr const char* kObjectiveRow = "OBJ";
constexpr const char* kRhsName = "RHS";
constexpr const char* kBoundName = "BND";

std::string number(double value) {
    char buffer[64];
    auto [end, ec] = std::to_chars(buffer, buffer + sizeof buffer, value);
    return std::string(buffer, end);
}

std::string padded(const std::string& text, std::size_t width) {
    return text.size() >= width ? text : text + std::string(width - text.size(), ' ');
}

// Fields start at columns 2, 5, 15, 25, 40, 50 when names fit in eight characters.
std::string entry(const std::string& f2, const std::string& f3, const std::string& f4) {
    std::string line = "    " + padded(f2, 8) + "  " + padded(f3, 8);
    if (!f4.empty()) line += "  " + f4;
    return line;
}

std::string bound_line(const char* type, const std::string& col, const std::string& value = {}) {
    std::string line = std::string(" ") + type + " " + padded(kBoundName, 8) + "  " + padded(col, 8);
    if (!value.empty()) line += "  " + value;
    return line;
}

double parse_number(const std::string& token, std::size_t line_no) {
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
    if (ec != std::errc() || ptr != token.data() + token.size()) {
        if (token == "inf" || token == "Inf" || token == "1e+30" || token == "Infinity") return kInfinity;
        if (token == "-inf" || token == "-Inf" || token == "-Infinity") return -kInfinity;
        throw ParseError("line " + std::to_string(line_no) + ": invalid number '" + token + "'");
    }
    if (std::abs(value) >= 1e30) return value > 0 ? kInfinity : -kInfinity;
    return value;
}

std::vector<std::string> tokenize(const std::string& line) {
    std::istringstream stream(line);
    std::vector<std::string> tokens;
    for (std::string token; stream >> token;) tokens.push_back(token);
    return tokens;
}

}  // namespace

void write_mps(const MilpModel& model, std::ostream& out) {
    const auto& vars = model.variables();
    const auto& rows = model.rows();

    std::vector<SparseVector> columns(vars.size());
    for (const auto& [col, c] : model.objective()) columns[col].emplace_back(rows.size(), c);
    for (std::size_t r = 0; r < rows.size(); ++r)
        for (const auto& [col, c] : rows[r].coefficients) columns[col].emplace_back(r, c);
    auto row_name = [&](std::size_t r) { return r == rows.size() ? std::string(kObjectiveRow) : rows[r].name; };

    out << "NAME          " << model.name << '\n';
    out << "ROWS\n";
    out << " N  " << kObjectiveRow << '\n';
    for (const auto& row : rows) {
        const char type = row.sense == Sense::le ? 'L' : row.sense == Sense::ge ? 'G' : 'E';
        out << ' ' << type << "  " << row.name << '\n';
    }

    out << "COLUMNS\n";
    bool in_marker = false;
    int marker = 0;
    auto marker_line = [&](const char* kind) {
        out << "    " << padded("MARKER" + std::to_string(marker++), 8) << "  'MARKER'                 '" << kind << "'\n";
    };
    for (std::size_t col = 0; col < vars.size(); ++col) {
        const bool integral = vars[col].kind != VarKind::continuous;
        if (integral != in_marker) {
            marker_line(integral ? "INTORG" : "INTEND");
            in_marker = integral;
        }
        if (columns[col].empty()) {
            out << entry(vars[col].name, kObjectiveRow, "0") << '\n';  // keeps the column declared
            continue;
        }
        // Objective entries were pushed first; rows follow in row order.
        std::stable_sort(columns[col].begin(), columns[col].end(), [&](const auto& a, const auto& b) {
            const bool a_obj = a.first == rows.size();
            const bool b_obj = b.first == rows.size();
            return a_obj != b_obj ? a_obj : a.first < b.first;
        });
        for (const auto& [r, c] : columns[col]) out << entry(vars[col].name, row_name(r), number(c)) << '\n';
    }
    if (in_marker) marker_line("INTEND");

    out << "RHS\n";
    if (model.objective_constant() != 0.0)
        out << entry(kRhsName, kObjectiveRow, number(-model.objective_constant())) << '\n';
    for (const auto& row : rows)
        if (row.rhs != 0.0) out << entry(kRhsName, row.name, number(row.rhs)) << '\n';

    out << "BOUNDS\n";
    for (const auto& var : vars) {
        if (var.kind == VarKind::binary) {
            out << bound_line("BV", var.name) << '\n';
            if (var.lower == var.upper)
                out << bound_line("FX", var.name, number(var.lower)) << '\n';
            else {
                if (var.lower != 0.0) out << bound_line("LO", var.name, number(var.lower)) << '\n';
                if (var.upper != 1.0) out << bound_line("UP", var.name, number(var.upper)) << '\n';
            }
            continue;
        }
        if (var.lower == var.upper) {
            out << bound_line("FX", var.name, number(var.lower)) << '\n';
            continue;
        }
        if (var.lower == -kInfinity)
            out << bound_line("MI", var.name) << '\n';
        else if (var.lower != 0.0)
            out << bound_line("LO", var.name, number(var.lower)) << '\n';
        if (var.upper != kInfinity)
            out << bound_line("UP", var.name, number(var.upper)) << '\n';
        else if (var.kind == VarKind::integer)
            out << bound_line("PL", var.name) << '\n';
    }
    out << "ENDATA\n";
}

MilpModel read_mps(std::istream& in) {
    enum class Section { none, rows, columns, rhs, bounds, done };
    Section section = Section::none;

    MilpModel model;
    std::string objective_row;
    struct PendingRow {
        std::string name;
        Sense sense;
        SparseVector coefficients;
        double rhs = 0.0;
    };
    std::vector<PendingRow> rows;
    std::map<std::string, std::size_t> row_index;
    SparseVector objective;
    double objective_constant = 0.0;

    struct Column {
        std::string name;
        VarKind kind;
        double lower = 0.0;
        double upper = kInfinity;
    };
    std::vector<Column> columns;
    std::map<std::string, std::size_t> column_index;
    bool integral = false;

    auto add_coefficient = [&](std::size_t col, const std::string& row, double value, std::size_t line_no) {
        if (row == objective_row) {
            if (value != 0.0) objective.emplace_back(col, value);
            return;
        }
        auto it = row_index.find(row);
        if (it == row_index.end()) throw ParseError("line " + std::to_string(line_no) + ": unknown row '" + row + "'");
        if (value != 0.0) rows[it->second].coefficients.emplace_back(col, value);
    };
    auto column = [&](const std::string& name, std::size_t line_no) -> Column& {
        auto it = column_index.find(name);
        if (it == column_index.end())
            throw ParseError("line " + std::to_string(line_no) + ": unknown column '" + name + "'");
        return columns[it->second];
    };

    std::string line;
    std::size_t line_no = 0;
    while (section != Section::done && std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '*') continue;
        auto tokens = tokenize(line);
        if (tokens.empty()) continue;

        if (line[0] != ' ' && line[0] != '\t') {
            const auto& head = tokens[0];
            if (head == "NAME") {
                model.name = tokens.size() > 1 ? tokens[1] : "";
            } else if (head == "ROWS") {
                section = Section::rows;
            } else if (head == "COLUMNS") {
                section = Section::columns;
            } else if (head == "RHS") {
                section = Section::rhs;
            } else if (head == "BOUNDS") {
                section = Section::bounds;
            } else if (head == "ENDATA") {
                section = Section::done;
            } else if (head == "OBJSENSE") {
                if (tokens.size() > 1 && tokens[1] != "MIN" && tokens[1] != "MINIMIZE")
                    throw ParseError("only minimization models are supported");
            } else {
                throw ParseError("line " + std::to_string(line_no) + ": unsupported section '" + head + "'");
            }
            continue;
        }

        switch (section) {
            case Section::rows: {
                if (tokens.size() != 2) throw ParseError("line " + std::to_string(line_no) + ": malformed ROWS entry");
                const auto& type = tokens[0];
                if (type == "N") {
                    if (objective_row.empty()) objective_row = tokens[1];
                    continue;
                }
                Sense sense = type == "L" ? Sense::le : type == "G" ? Sense::ge : Sense::eq;
                if (type != "L" && type != "G" && type != "E")
                    throw ParseError("line " + std::to_string(line_no) + ": unknown row type '" + type + "'");
                row_index.emplace(tokens[1], rows.size());
                rows.push_back({tokens[1], sense, {}, 0.0});
                break;
            }
            case Section::columns: {
                if (tokens.size() >= 3 && tokens[1] == "'MARKER'") {
                    if (tokens[2] == "'INTORG'") integral = true;
                    else if (tokens[2] == "'INTEND'") integral = false;
                    continue;
                }
                if (tokens.size() != 3 && tokens.size() != 5)
                    throw ParseError("line " + std::to_string(line_no) + ": malformed COLUMNS entry");
                auto it = column_index.find(tokens[0]);
                std::size_t col;
                if (it == column_index.end()) {
                    col = columns.size();
                    column_index.emplace(tokens[0], col);
                    columns.push_back({tokens[0], integral ? VarKind::integer : VarKind::continuous});
                } else {
                    col = it->second;
                }
                for (std::size_t k = 1; k + 1 < tokens.size(); k += 2)
                    add_coefficient(col, tokens[k], parse_number(tokens[k + 1], line_no), line_no);
                break;
            }
            case Section::rhs: {
                if (tokens.size() != 3 && tokens.size() != 5)
                    throw ParseError("line " + std::to_string(line_no) + ": malformed RHS entry");
                for (std::size_t k = 1; k + 1 < tokens.size(); k += 2) {
                    const double value = parse_number(tokens[k + 1], line_no);
                    if (tokens[k] == objective_row) {
                        objective_constant = -value;
                        continue;
                    }
                    auto it = row_index.find(tokens[k]);
                    if (it == row_index.end())
                        throw ParseError("line " + std::to_string(line_no) + ": unknown row '" + tokens[k] + "'");
                    rows[it->second].rhs = value;
                }
                break;
            }
            case Section::bounds: {
                if (tokens.size() < 3) throw ParseError("line " + std::to_string(line_no) + ": malformed BOUNDS entry");
                const auto& type = tokens[0];
                Column& col = column(tokens[2], line_no);
                auto value = [&] {
                    if (tokens.size() < 4) throw ParseError("line " + std::to_string(line_no) + ": bound value missing");
                    return parse_number(tokens[3], line_no);
                };
                if (type == "BV") {
                    col.kind = VarKind::binary;
                    col.lower = 0.0;
                    col.upper = 1.0;
                } else if (type == "LO") {
                    col.lower = value();
                } else if (type == "UP") {
                    col.upper = value();
                } else if (type == "FX") {
                    col.lower = col.upper = value();
                } else if (type == "MI") {
                    col.lower = -kInfinity;
                } else if (type == "PL") {
                    col.upper = kInfinity;
                } else if (type == "FR") {
                    col.lower = -kInfinity;
                    col.upper = kInfinity;
                } else if (type == "LI" || type == "UI") {
                    if (col.kind == VarKind::continuous) col.kind = VarKind::integer;
                    (type == "LI" ? col.lower : col.upper) = value();
                } else {
                    throw ParseError("line " + std::to_string(line_no) + ": unknown bound type '" + type + "'");
                }
                break;
            }
            default:
                throw ParseError("line " + std::to_string(line_no) + ": data outside a section");
        }
    }
    if (section != Section::done) throw ParseError("missing ENDATA");
    if (objective_row.empty()) throw ParseError("no objective (N) row");

    for (const auto& col : columns) model.add_variable(col.name, col.kind, col.lower, col.upper);
    for (auto& row : rows) model.add_row(row.name, std::move(row.coefficients), row.sense, row.rhs);
    model.set_objective(std::move(objective), objective_constant);
    return model;
}

void export_interchange(const MilpModel& model, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    write_mps(model, out);
    out.flush();
    if (!out) throw IoError("failed writing '" + path.string() + "'");
}

MilpModel import_interchange(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path.string() + "'");
    return read_mps(in);
}

namespace {

// Parses the dotted one-based suffix of a column name.
std::vector<std::size_t> indices_of(const std::string& name, std::size_t prefix) {
    std::vector<std::size_t> out;
    std::size_t pos = prefix;
    while (pos < name.size()) {
        std::size_t value = 0;
        auto [ptr, ec] = std::from_chars(name.data() + pos, name.data() + name.size(), value);
        if (ec != std::errc() || value == 0) throw ParseError("malformed column name '" + name + "'");
        out.push_back(value - 1);
        pos = static_cast<std::size_t>(ptr - name.data());
        if (pos < name.size()) {
            if (name[pos] != '.') throw ParseError("malformed column name '" + name + "'");
            ++pos;
        }
    }
    return out;
}

}  // namespace

ImportedSolution import_solution(const Instance& instance, const MilpModel& model, std::istream& in) {
    constexpr double kTolerance = 1e-6;
    Solution solution(instance);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        auto tokens = tokenize(line);
        if (tokens.empty() || tokens[0][0] == '#') continue;
        if (tokens.size() != 2)
            throw ParseError("line " + std::to_string(line_no) + ": expected 'name value'");
        const auto& name = tokens[0];
        auto col = model.find(name);
        if (!col) throw ParseError("line " + std::to_string(line_no) + ": unknown variable '" + name + "'");
        const auto& var = model.variables()[*col];
        double value = parse_number(tokens[1], line_no);
        if (value < var.lower - kTolerance || value > var.upper + kTolerance)
            throw IntegrityError(name + " = " + tokens[1] + " lies outside [" + number(var.lower) + ", " +
                                 number(var.upper) + "]");
        if (var.kind != VarKind::continuous) {
            const double rounded = std::round(value);
            if (std::abs(value - rounded) > kTolerance)
                throw IntegrityError(name + " = " + tokens[1] + " is not integral");
            value = rounded;
        }

        if (name.rfind("x_", 0) == 0) {
            auto idx = indices_of(name, 2);
            if (idx.size() != 4) throw ParseError("malformed column name '" + name + "'");
            solution.set_x(idx[0], idx[1], instance.flat_variant(idx[2], idx[3]), value != 0.0);
        } else if (name.rfind("n_", 0) == 0) {
            auto idx = indices_of(name, 2);
            if (idx.size() != 3) throw ParseError("malformed column name '" + name + "'");
            solution.set_n(idx[0], instance.flat_variant(idx[1], idx[2]), static_cast<int>(value));
        }
        // w and z are implied by x and n.
    }
    fill_costs(instance, solution);
    FeasibilityReport report = check_feasibility(instance, solution);
    return {std::move(solution), std::move(report)};
}

ImportedSolution import_solution(const Instance& instance, const MilpModel& model, const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path.string() + "'");
    return import_solution(instance, model, in);
}

}  // namespace mvsp
