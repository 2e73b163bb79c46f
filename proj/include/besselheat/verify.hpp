#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "besselheat/kernels.hpp"
#include "besselheat/specfun.hpp"

namespace besselheat {

enum class KernelKind { main, reflected, killed, free };

const char* to_string(KernelKind kind);
KernelKind kernel_kind_from_string(const std::string& name);

struct Grid {
    std::vector<double> x;
    std::vector<double> y;
    std::vector<double> t;

    /// x, y in {0.02, 0.05, 0.1, ..., 0.9, 0.95, 0.98}; t in {0.05, 0.1, 0.2, 0.5, 1, 2, 5, 10}
    static Grid standard();
    std::size_t size() const { return x.size() * y.size() * t.size(); }
};

struct GridPoint {
    double t = 0.0;
    double x = 0.0;
    double y = 0.0;

    bool operator==(const GridPoint&) const = default;
};

enum class NodeStatus { counted, refused, inaccurate };

/// One grid node of a scan, in t-major, then x, then y order.
struct NodeRatio {
    GridPoint at;
    NodeStatus status = NodeStatus::counted;
    double kernel = 0.0;
    double comparator = 0.0;
    double ratio = 0.0;
    double tail_bound = 0.0;  ///< truncation bound plus rounding estimate; 0 for the free kernel
};

struct RatioReport {
    Order nu;
    KernelKind which = KernelKind::main;
    Grid grid;
    double ratio_min = 0.0;
    double ratio_max = 0.0;
    GridPoint argmin;
    GridPoint argmax;
    /// refused by the series floor plus nodes whose error estimate is >= 1% of the value
    int ill_conditioned_count = 0;
    int refused_count = 0;
    int counted = 0;
    std::vector<NodeRatio> nodes;

    double spread() const { return ratio_max / ratio_min; }
};

struct VerifyOptions {
    std::optional<unsigned> threads;
    double eps = kernels::kDefaultEps;
    double floor = kernels::kDefaultSeriesFloor;
};

/// kernel / comparator on every grid node.  nu must exceed -1 except for
/// `killed`, which takes any real index.  Throws DomainError on an empty or
/// non-interior grid and IllConditioned if no node can be counted.
RatioReport ratio_scan(Order nu, const Grid& grid, KernelKind which, const VerifyOptions& options = {});

// ---------------------------------------------------------------------------

/// Both sides of an inequality lhs <= rhs, kept as logarithms (the sides
/// themselves overflow for large arguments).
struct InequalitySides {
    double log_lhs = 0.0;
    double log_rhs = 0.0;

    double log_margin() const { return log_rhs - log_lhs; }
    double lhs() const;
    double rhs() const;
};

/// I_nu(y)/I_nu(x) <= e^{y-x} (y/x)^nu,  nu >= -1/2, y >= x > 0
InequalitySides laforgia_sides(double nu, double x, double y);
/// I_nu(y)/I_nu(x) <= e^{y-x} (y/x)^{nu+1},  nu > -1, y > x > 1
InequalitySides shifted_laforgia_sides(double nu, double x, double y);
/// I_{nu+1}(z)/I_nu(z) < z/(z+nu+1/2),  nu >= -1/2, z > 0
InequalitySides nasell_sides(double nu, double z);

struct InequalitySample {
    std::uint64_t index = 0;
    double nu = 0.0;
    double x = 0.0;  ///< z for the Nasell bound
    double y = 0.0;  ///< unused for the Nasell bound
    InequalitySides sides;
};

struct InequalityResult {
    std::string name;
    std::string domain;
    std::uint64_t samples = 0;
    std::vector<InequalitySample> violations;
    std::vector<InequalitySample> witnesses;  ///< smallest margins first
};

struct InequalityReport {
    std::uint64_t seed = 0;
    double slack = 0.0;
    std::vector<InequalityResult> results;

    std::size_t violation_count() const;
};

/// `samples` random draws per inequality, each inside the inequality's
/// domain.  A violation is log(lhs) - log(rhs) > log1p(slack).
InequalityReport inequality_suite(std::uint64_t samples, std::uint64_t seed, const VerifyOptions& options = {},
                                  double slack = 1e-12, std::size_t witness_count = 5);

// ---------------------------------------------------------------------------

struct SemigroupReport {
    double lhs = 0.0;
    double rhs = 0.0;
    double defect = 0.0;
    double defect_half = 0.0;  ///< same rule with half the nodes
    int nodes = 0;
    bool converged = false;  ///< defect decreased on doubling, or both are below 1e-6
};

/// p_1(t+s, x, y) against int_0^1 p_1(t, x, z) p_1(s, z, y) z^{2nu+1} dz by
/// composite 10-point Gauss-Legendre panels (about quad_nodes nodes); the
/// part on [0, 0.1] is integrated in u = sqrt(z).
SemigroupReport semigroup_check(Order nu, double t, double s, double x, double y, int quad_nodes,
                                const VerifyOptions& options = {});

// ---------------------------------------------------------------------------

struct LargeTimeEntry {
    double t = 0.0;
    double kernel = 0.0;
    double first_term = 0.0;
    double relative_gap = 0.0;  ///< |G - first term| / |G|
    double normalized = 0.0;    ///< G e^{lambda_1^2 t} / ((1-x)(1-y))
};

struct LargeTimeReport {
    Order nu;
    double x = 0.0;
    double y = 0.0;
    double lambda1 = 0.0;
    std::vector<LargeTimeEntry> entries;  ///< sorted by t
    bool gap_monotone = false;
    double variation_top_decade = 0.0;  ///< (max - min)/max of `normalized` over t >= t_max/10
    double variation_last_pair = 0.0;   ///< same for the two largest t
    double tolerance = 0.01;
    bool stable = false;  ///< variation_top_decade <= tolerance
};

/// Throws DomainError if some t < 2/lambda_1^2 or x, y are outside [0, 1).
LargeTimeReport large_time_check(Order nu, double x, double y, std::vector<double> t_list,
                                 const VerifyOptions& options = {});

// ---------------------------------------------------------------------------

struct AsymptoticEntry {
    std::string law;  ///< "zero" or "infinity"
    double z = 0.0;
    double value = 0.0;  ///< normalized so that the limit is 1
    double deviation = 0.0;
    double tolerance = 0.0;
    double predicted = 0.0;  ///< leading correction term
    bool passed = false;
};

struct AsymptoticsReport {
    Order nu;
    std::vector<AsymptoticEntry> entries;
    bool passed = false;
};

/// I_nu(z) Gamma(nu+1)/(z/2)^nu at z = 1e-6, 1e-4 (tolerances 1e-5, 1e-3)
/// and e^{-z} I_nu(z) sqrt(2 pi z) at z = 50, 200 (tolerances 1e-2, 2.5e-3).
AsymptoticsReport asymptotics_check(Order nu);

}  // namespace besselheat
