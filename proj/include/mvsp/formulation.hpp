#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

#include "mvsp/instance.hpp"

namespace mvsp {

/// Candidate placement: assignment indicators x[i,e,(m,v)], replica counts n[e,(m,v)] and
/// cached node costs z[e]. Variants use the instance's flat index.
class Solution {
public:
    Solution() = default;
    explicit Solution(const Instance& instance)
        : iot_(instance.num_iot()),
          edge_(instance.num_edge()),
          variants_(instance.total_variants()),
          x_(iot_ * edge_ * variants_, 0),
          n_(edge_ * variants_, 0),
          z_(edge_, 0.0) {}

    std::uint8_t x(std::size_t i, std::size_t e, std::size_t f) const { return x_[(i * edge_ + e) * variants_ + f]; }
    void set_x(std::size_t i, std::size_t e, std::size_t f, bool on) { x_[(i * edge_ + e) * variants_ + f] = on ? 1 : 0; }

    int n(std::size_t e, std::size_t f) const { return n_[e * variants_ + f]; }
    void set_n(std::size_t e, std::size_t f, int count) { n_[e * variants_ + f] = count; }

    double z(std::size_t e) const { return z_[e]; }
    bool evaluated() const noexcept { return evaluated_; }

    const std::vector<std::uint8_t>& x_values() const noexcept { return x_; }
    std::vector<std::uint8_t>& x_values() noexcept { return x_; }
    const std::vector<int>& n_values() const noexcept { return n_; }
    std::vector<int>& n_values() noexcept { return n_; }
    const std::vector<double>& z_values() const noexcept { return z_; }

    bool matches(const Instance& instance) const noexcept {
        return iot_ == instance.num_iot() && edge_ == instance.num_edge() &&
               variants_ == instance.total_variants();
    }

    /// Assignment and replica counts agree; z is derived and ignored.
    bool same_placement(const Solution& other) const { return x_ == other.x_ && n_ == other.n_; }

private:
    friend void fill_costs(const Instance&, Solution&);

    std::size_t iot_ = 0;
    std::size_t edge_ = 0;
    std::size_t variants_ = 0;
    std::vector<std::uint8_t> x_;
    std::vector<int> n_;
    std::vector<double> z_;
    bool evaluated_ = false;
};

enum class ConstraintId { assignment, latency_req, load, replica_link, replica_cap, memory, utilization };

std::string_view to_string(ConstraintId id);
ConstraintId constraint_from_string(std::string_view name);

/// Zero-based indices; -1 where the constraint does not range over that set.
struct Location {
    int iot = -1;
    int edge = -1;
    int model = -1;
    int variant = -1;

    bool operator==(const Location&) const = default;
};

struct Violation {
    ConstraintId constraint;
    Location where;
    double magnitude;  // excess in the constraint's own unit (requests, ms, memory units, ...)

    bool operator==(const Violation&) const = default;
};

struct FeasibilityReport {
    std::vector<Violation> violations;

    bool feasible() const noexcept { return violations.empty(); }
    std::size_t count(ConstraintId id) const;
};

/// Absolute slack allowed on every constraint before it counts as violated.
inline constexpr double kFeasibilityTolerance = 1e-9;

/// IL of variant `f` on node `e`: exclusive latency, plus replication and co-location
/// interference. The self-replication term uses max(n - 1, 0).
double inference_latency(const Instance& instance, const Solution& solution, std::size_t edge, std::size_t f);

/// Request-weighted mean of CL + IL over all assigned pairs; 0 without demand.
double average_latency(const Instance& instance, const Solution& solution);

/// u_e = (1 / C^e) * sum of R * n over variants on node e. Not clamped.
double node_utilization(const Instance& instance, const Solution& solution, std::size_t edge);

/// Max over the instance's tangent set at u.
double utilization_cost(const Instance& instance, double u);

/// Mean node cost without touching the solution's cache.
double average_cost(const Instance& instance, const Solution& solution);

/// Mean node cost; also fills solution.z and marks the solution evaluated.
double average_cost(const Instance& instance, Solution& solution);

/// Recomputes z[e] for every node.
void fill_costs(const Instance& instance, Solution& solution);

double objective(const Instance& instance, const Solution& solution);

double mean_utilization(const Instance& instance, const Solution& solution);

FeasibilityReport check_feasibility(const Instance& instance, const Solution& solution);

}  // namespace mvsp
