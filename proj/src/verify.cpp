#include "besselheat/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <string>

#include "besselheat/errors.hpp"
#include "besselheat/parallel.hpp"
#include "besselheat/quadrature.hpp"
#include "besselheat/random.hpp"

namespace besselheat {
namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kComparatorFloor = 1e-300;
constexpr double kAccuracyFraction = 0.01;

kernels::SeriesOptions series_options(const VerifyOptions& o, const specfun::ModeTable* table)
{
    kernels::SeriesOptions s;
    s.eps = o.eps;
    s.floor = o.floor;
    s.modes = table;
    return s;
}

struct Neumaier {
    double sum = 0.0;
    double carry = 0.0;

    void add(double v)
    {
        const double t = sum + v;
        carry += std::fabs(sum) >= std::fabs(v) ? (sum - t) + v : (v - t) + sum;
        sum = t;
    }
    double value() const { return sum + carry; }
};

double log_i(double nu, double z)
{
    return specfun::log_bessel_i_scaled(Order{nu}, z) + z;
}

double log_uniform(Philox4x32& rng, double lo_exp, double hi_exp)
{
    return std::pow(10.0, lo_exp + (hi_exp - lo_exp) * rng.uniform());
}

}  // namespace

const char* to_string(KernelKind kind)
{
    switch (kind) {
    case KernelKind::main:
        return "main";
    case KernelKind::reflected:
        return "reflected";
    case KernelKind::killed:
        return "killed";
    case KernelKind::free:
        return "free";
    }
    return "?";
}

KernelKind kernel_kind_from_string(const std::string& name)
{
    for (KernelKind k : {KernelKind::main, KernelKind::reflected, KernelKind::killed, KernelKind::free}) {
        if (name == to_string(k)) {
            return k;
        }
    }
    throw DomainError("unknown kernel '" + name + "' (expected main, reflected, killed or free)");
}

Grid Grid::standard()
{
    Grid g;
    g.x = {0.02, 0.05};
    for (int i = 1; i <= 9; ++i) {
        g.x.push_back(i / 10.0);
    }
    g.x.push_back(0.95);
    g.x.push_back(0.98);
    g.y = g.x;
    g.t = {0.05, 0.1, 0.2, 0.5, 1.0, 2.0, 5.0, 10.0};
    return g;
}

RatioReport ratio_scan(Order nu, const Grid& grid, KernelKind which, const VerifyOptions& options)
{
    if (grid.size() == 0) {
        throw DomainError("ratio_scan: empty grid");
    }
    if (which == KernelKind::killed) {
        if (!std::isfinite(nu.nu)) {
            throw DomainError("ratio_scan: index must be finite");
        }
    } else {
        require_bessel_order(nu, "ratio_scan");
    }
    for (double t : grid.t) {
        if (!(t > 0.0) || !std::isfinite(t)) {
            throw DomainError("ratio_scan: grid times must be positive");
        }
    }
    for (const auto* axis : {&grid.x, &grid.y}) {
        for (double v : *axis) {
            const bool ok = which == KernelKind::free ? (v > 0.0 && std::isfinite(v)) : (v > 0.0 && v < 1.0);
            if (!ok) {
                throw DomainError(which == KernelKind::free ? "ratio_scan: grid points must be positive"
                                                            : "ratio_scan: grid points must lie in (0, 1)");
            }
        }
    }

    const Order series_order{which == KernelKind::killed ? std::fabs(nu.nu) : nu.nu};
    std::unique_ptr<specfun::ModeTable> table;
    double lambda1 = 0.0;
    if (which != KernelKind::free) {
        table = std::make_unique<specfun::ModeTable>(series_order, 64);
        lambda1 = (*table)[0].lambda;
    }
    const kernels::SeriesOptions sopts = series_options(options, table.get());

    RatioReport report;
    report.nu = nu;
    report.which = which;
    report.grid = grid;
    report.nodes.resize(grid.size());
    const std::size_t nx = grid.x.size();
    const std::size_t ny = grid.y.size();

    parallel_for(grid.size(), resolve_threads(options.threads), [&](std::size_t i) {
        NodeRatio node;
        node.at = GridPoint{grid.t[i / (nx * ny)], grid.x[(i / ny) % nx], grid.y[i % ny]};
        const KernelQuery q{nu, node.at.t, node.at.x, node.at.y};
        try {
            SeriesValue v;
            switch (which) {
            case KernelKind::main:
                v = kernels::eigen_series_kernel(q, sopts);
                node.comparator = kernels::comparator_main(q, lambda1);
                break;
            case KernelKind::reflected:
                v = kernels::reflected_density(q, sopts);
                node.comparator = kernels::comparator_reflected(q, lambda1);
                break;
            case KernelKind::killed:
                v = kernels::killed_density(nu, q.t, q.x, q.y, sopts);
                node.comparator = kernels::comparator_killed(nu, q.t, q.x, q.y, lambda1);
                break;
            case KernelKind::free:
                v.value = kernels::free_density(q);
                node.comparator = kernels::free_density_comparator(q);
                break;
            }
            node.kernel = v.value;
            node.tail_bound = v.error_estimate();
            if (!(v.value > 0.0) || v.error_estimate() >= kAccuracyFraction * v.value) {
                node.status = NodeStatus::inaccurate;
            }
        } catch (const IllConditioned&) {
            node.status = NodeStatus::refused;
        }
        if (node.status != NodeStatus::refused) {
            if (!(node.comparator > kComparatorFloor)) {
                throw NumericalError("ratio_scan: comparator underflow at t=" + std::to_string(q.t) +
                                     " x=" + std::to_string(q.x) + " y=" + std::to_string(q.y));
            }
            node.ratio = node.kernel / node.comparator;
        }
        report.nodes[i] = node;
    });

    bool first = true;
    for (const NodeRatio& node : report.nodes) {
        if (node.status == NodeStatus::refused) {
            ++report.refused_count;
            ++report.ill_conditioned_count;
            continue;
        }
        if (node.status == NodeStatus::inaccurate) {
            ++report.ill_conditioned_count;
            continue;
        }
        ++report.counted;
        if (first || node.ratio < report.ratio_min) {
            report.ratio_min = node.ratio;
            report.argmin = node.at;
        }
        if (first || node.ratio > report.ratio_max) {
            report.ratio_max = node.ratio;
            report.argmax = node.at;
        }
        first = false;
    }
    if (report.counted == 0) {
        throw IllConditioned("ratio_scan: no grid node passed the series floor and accuracy checks");
    }
    return report;
}

// ---------------------------------------------------------------------------

double InequalitySides::lhs() const { return std::exp(log_lhs); }
double InequalitySides::rhs() const { return std::exp(log_rhs); }

InequalitySides laforgia_sides(double nu, double x, double y)
{
    if (!(nu >= -0.5) || !(x > 0.0) || !(y >= x)) {
        throw DomainError("laforgia_sides: requires nu >= -1/2 and y >= x > 0");
    }
    return {log_i(nu, y) - log_i(nu, x), (y - x) + nu * std::log(y / x)};
}

InequalitySides shifted_laforgia_sides(double nu, double x, double y)
{
    if (!(nu > -1.0) || !(x > 1.0) || !(y > x)) {
        throw DomainError("shifted_laforgia_sides: requires nu > -1 and y > x > 1");
    }
    return {log_i(nu, y) - log_i(nu, x), (y - x) + (nu + 1.0) * std::log(y / x)};
}

InequalitySides nasell_sides(double nu, double z)
{
    if (!(nu >= -0.5) || !(z > 0.0)) {
        throw DomainError("nasell_sides: requires nu >= -1/2 and z > 0");
    }
    const double lhs = specfun::log_bessel_i_scaled(Order{nu + 1.0}, z) - specfun::log_bessel_i_scaled(Order{nu}, z);
    return {lhs, std::log(z) - std::log(z + nu + 0.5)};
}

std::size_t InequalityReport::violation_count() const
{
    std::size_t n = 0;
    for (const auto& r : results) {
        n += r.violations.size();
    }
    return n;
}

InequalityReport inequality_suite(std::uint64_t samples, std::uint64_t seed, const VerifyOptions& options, double slack,
                                  std::size_t witness_count)
{
    if (samples < 1) {
        throw DomainError("inequality_suite: samples must be at least 1");
    }
    if (!(slack >= 0.0)) {
        throw DomainError("inequality_suite: slack must be nonnegative");
    }
    struct Spec {
        const char* name;
        const char* domain;
        InequalitySample (*draw)(Philox4x32&);
    };
    const Spec specs[] = {
        {"laforgia", "nu in [-1/2, 5], x in [1e-3, 1e3] log-uniform, y = x (1 + 10^U(-4,1))",
         [](Philox4x32& r) {
             InequalitySample s;
             s.nu = -0.5 + 5.5 * r.uniform();
             s.x = log_uniform(r, -3.0, 3.0);
             s.y = s.x * (1.0 + log_uniform(r, -4.0, 1.0));
             s.sides = laforgia_sides(s.nu, s.x, s.y);
             return s;
         }},
        {"shifted_laforgia", "nu in (-1, 4], x = 1 + 10^U(-3,1.5), y = x + 10^U(-3,1.5)",
         [](Philox4x32& r) {
             InequalitySample s;
             s.nu = -1.0 + 5.0 * r.uniform();
             s.x = 1.0 + log_uniform(r, -3.0, 1.5);
             s.y = s.x + log_uniform(r, -3.0, 1.5);
             s.sides = shifted_laforgia_sides(s.nu, s.x, s.y);
             return s;
         }},
        {"nasell", "nu in [-1/2, 5], z in [1e-4, 1e3] log-uniform",
         [](Philox4x32& r) {
             InequalitySample s;
             s.nu = -0.5 + 5.5 * r.uniform();
             s.x = log_uniform(r, -4.0, 3.0);
             s.sides = nasell_sides(s.nu, s.x);
             return s;
         }},
    };

    const double threshold = -std::log1p(slack);
    const unsigned threads = resolve_threads(options.threads);
    InequalityReport report;
    report.seed = seed;
    report.slack = slack;
    std::uint32_t stream = 0;
    for (const Spec& spec : specs) {
        std::vector<InequalitySample> drawn(samples);
        const std::uint32_t id = stream++;
        parallel_for(samples, threads, [&](std::size_t i) {
            Philox4x32 rng(seed, id, i);
            InequalitySample s = spec.draw(rng);
            s.index = i;
            drawn[i] = s;
        });

        InequalityResult result;
        result.name = spec.name;
        result.domain = spec.domain;
        result.samples = samples;
        for (const auto& s : drawn) {
            if (s.sides.log_margin() < threshold) {
                result.violations.push_back(s);
            }
        }
        const auto by_margin = [](const InequalitySample& a, const InequalitySample& b) {
            const double ma = a.sides.log_margin();
            const double mb = b.sides.log_margin();
            return ma != mb ? ma < mb : a.index < b.index;
        };
        const std::size_t k = std::min<std::size_t>(witness_count, drawn.size());
        std::partial_sort(drawn.begin(), drawn.begin() + static_cast<std::ptrdiff_t>(k), drawn.end(), by_margin);
        result.witnesses.assign(drawn.begin(), drawn.begin() + static_cast<std::ptrdiff_t>(k));
        report.results.push_back(std::move(result));
    }
    return report;
}

// ---------------------------------------------------------------------------

namespace {

struct WeightedNode {
    double z;
    double weight;  // quadrature weight times the speed-measure density
};

std::vector<WeightedNode> speed_measure_rule(double nu, int panels)
{
    static const QuadratureRule base = gauss_legendre(10);
    const double split = 0.1;
    const double root = std::sqrt(split);
    const int left = std::max(1, static_cast<int>(std::lround(panels * root / (root + (1.0 - split)))));
    const int right = std::max(1, panels - left);
    std::vector<WeightedNode> out;
    // z = u^2 on [0, split]: z^{2nu+1} dz = 2 u^{4nu+3} du
    const QuadratureRule lo = composite(base, 0.0, root, left);
    for (std::size_t i = 0; i < lo.nodes.size(); ++i) {
        const double u = lo.nodes[i];
        out.push_back({u * u, lo.weights[i] * 2.0 * std::pow(u, 4.0 * nu + 3.0)});
    }
    const QuadratureRule hi = composite(base, split, 1.0, right);
    for (std::size_t i = 0; i < hi.nodes.size(); ++i) {
        out.push_back({hi.nodes[i], hi.weights[i] * std::pow(hi.nodes[i], 2.0 * nu + 1.0)});
    }
    return out;
}

double chapman_kolmogorov_rhs(Order nu, double t, double s, double x, double y, int panels,
                              const kernels::SeriesOptions& sopts, unsigned threads)
{
    const std::vector<WeightedNode> rule = speed_measure_rule(nu.nu, panels);
    std::vector<double> parts(rule.size());
    parallel_for(rule.size(), threads, [&](std::size_t i) {
        const double z = rule[i].z;
        const double a = kernels::reflected_density({nu, t, x, z}, sopts).value;
        const double b = kernels::reflected_density({nu, s, z, y}, sopts).value;
        parts[i] = rule[i].weight * (a * b);
    });
    Neumaier acc;
    for (double p : parts) {
        acc.add(p);
    }
    return acc.value();
}

}  // namespace

SemigroupReport semigroup_check(Order nu, double t, double s, double x, double y, int quad_nodes,
                                const VerifyOptions& options)
{
    require_bessel_order(nu, "semigroup_check");
    if (!(t > 0.0) || !(s > 0.0)) {
        throw DomainError("semigroup_check: requires t > 0 and s > 0");
    }
    if (!(x >= 0.0 && x < 1.0) || !(y >= 0.0 && y < 1.0)) {
        throw DomainError("semigroup_check: requires x, y in [0, 1)");
    }
    if (quad_nodes < 40) {
        throw DomainError("semigroup_check: requires at least 40 quadrature nodes");
    }
    const specfun::ModeTable table(nu, 200);
    const kernels::SeriesOptions sopts = series_options(options, &table);
    const unsigned threads = resolve_threads(options.threads);

    // p_1 at time t is G at t/2; refuse early if either factor is below the floor
    const int panels = quad_nodes / 10;
    SemigroupReport r;
    r.nodes = panels * 10;
    r.lhs = kernels::reflected_density({nu, t + s, x, y}, sopts).value;
    r.rhs = chapman_kolmogorov_rhs(nu, t, s, x, y, panels, sopts, threads);
    const double half = chapman_kolmogorov_rhs(nu, t, s, x, y, std::max(2, panels / 2), sopts, threads);
    r.defect = std::fabs(r.lhs - r.rhs) / std::fabs(r.lhs);
    r.defect_half = std::fabs(r.lhs - half) / std::fabs(r.lhs);
    r.converged = r.defect <= r.defect_half || std::max(r.defect, r.defect_half) <= 1e-6;
    return r;
}

// ---------------------------------------------------------------------------

LargeTimeReport large_time_check(Order nu, double x, double y, std::vector<double> t_list, const VerifyOptions& options)
{
    require_bessel_order(nu, "large_time_check");
    if (!(x >= 0.0 && x < 1.0) || !(y >= 0.0 && y < 1.0)) {
        throw DomainError("large_time_check: requires x, y in [0, 1)");
    }
    if (t_list.empty()) {
        throw DomainError("large_time_check: empty time list");
    }
    const EigenMode first = specfun::eigen_mode(nu, 1);
    const double l2 = first.lambda * first.lambda;
    const double t_min = 2.0 / l2;
    std::sort(t_list.begin(), t_list.end());
    if (!(t_list.front() >= t_min * (1.0 - 1e-12))) {
        throw DomainError("large_time_check: every t must be at least 2/lambda_1^2 = " + std::to_string(t_min));
    }

    LargeTimeReport report;
    report.nu = nu;
    report.x = x;
    report.y = y;
    report.lambda1 = first.lambda;
    kernels::SeriesOptions sopts;
    sopts.eps = options.eps;
    sopts.floor = options.floor;
    for (double t : t_list) {
        const KernelQuery q{nu, t, x, y};
        LargeTimeEntry e;
        e.t = t;
        e.kernel = kernels::eigen_series_kernel(q, sopts).value;
        e.first_term = kernels::eigen_series_term(q, first);
        e.relative_gap = std::fabs(e.kernel - e.first_term) / std::fabs(e.kernel);
        e.normalized = e.kernel * std::exp(l2 * t) / ((1.0 - x) * (1.0 - y));
        report.entries.push_back(e);
    }

    report.gap_monotone = true;
    for (std::size_t i = 1; i < report.entries.size(); ++i) {
        const double prev = report.entries[i - 1].relative_gap;
        const double cur = report.entries[i].relative_gap;
        // below 1e-15 the gap is rounding noise
        if (!(cur < prev || cur <= 1e-15)) {
            report.gap_monotone = false;
        }
    }
    const auto variation = [](auto begin, auto end) {
        double lo = std::numeric_limits<double>::infinity();
        double hi = -lo;
        for (auto it = begin; it != end; ++it) {
            lo = std::min(lo, it->normalized);
            hi = std::max(hi, it->normalized);
        }
        return (hi - lo) / hi;
    };
    const double t_max = report.entries.back().t;
    auto top = std::find_if(report.entries.begin(), report.entries.end(),
                            [t_max](const LargeTimeEntry& e) { return e.t >= t_max / 10.0; });
    report.variation_top_decade = variation(top, report.entries.end());
    report.variation_last_pair = report.entries.size() < 2
                                     ? 0.0
                                     : variation(report.entries.end() - 2, report.entries.end());
    report.stable = report.variation_top_decade <= report.tolerance;
    return report;
}

// ---------------------------------------------------------------------------

AsymptoticsReport asymptotics_check(Order nu)
{
    require_bessel_order(nu, "asymptotics_check");
    AsymptoticsReport report;
    report.nu = nu;
    const double v = nu.nu;
    for (auto [z, tol] : {std::pair{1e-6, 1e-5}, std::pair{1e-4, 1e-3}}) {
        AsymptoticEntry e;
        e.law = "zero";
        e.z = z;
        e.tolerance = tol;
        e.value = std::exp(specfun::log_bessel_i_scaled(nu, z) + z - v * std::log(z / 2.0) + std::lgamma(v + 1.0));
        e.predicted = (z / 2.0) * (z / 2.0) / (v + 1.0);
        e.deviation = std::fabs(e.value - 1.0);
        e.passed = e.deviation <= tol;
        report.entries.push_back(e);
    }
    for (auto [z, tol] : {std::pair{50.0, 1e-2}, std::pair{200.0, 2.5e-3}}) {
        AsymptoticEntry e;
        e.law = "infinity";
        e.z = z;
        e.tolerance = tol;
        e.value = specfun::bessel_i_scaled(nu, z) * std::sqrt(2.0 * kPi * z);
        e.predicted = -(4.0 * v * v - 1.0) / (8.0 * z);
        e.deviation = std::fabs(e.value - 1.0);
        e.passed = e.deviation <= tol;
        report.entries.push_back(e);
    }
    report.passed = std::all_of(report.entries.begin(), report.entries.end(), [](const auto& e) { return e.passed; });
    return report;
}

}  // namespace besselheat
