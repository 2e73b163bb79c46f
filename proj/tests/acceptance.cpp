// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "besselheat/kernels.hpp"
#include "besselheat/montecarlo.hpp"
#include "besselheat/specfun.hpp"
#include "besselheat/verify.hpp"

using namespace besselheat;

namespace {

constexpr double kPi = 3.14159265358979323846;

const std::vector<double> kOrders = {-0.75, -0.5, 0.0, 0.5, 2.0};

struct Verdict {
    bool passed = true;
    std::string detail;

    void require(bool ok, const std::string& what)
    {
        if (!ok) {
            passed = false;
        }
        if (!detail.empty()) {
            detail += "; ";
        }
        detail += what + (ok ? "" : " [FAIL]");
    }
};

std::string fmt(const char* f, double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

int failures = 0;

void criterion(int id, const char* title, double time_limit, const std::function<Verdict()>& body)
{
    const auto start = std::chrono::steady_clock::now();
    Verdict v;
    try {
        v = body();
    } catch (const std::exception& e) {
        v.passed = false;
        v.detail = std::string("exception: ") + e.what();
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (time_limit > 0.0) {
        v.require(seconds <= time_limit, "runtime " + fmt("%.2f", seconds) + " s <= " + fmt("%g", time_limit) + " s");
    } else {
        v.require(true, "runtime " + fmt("%.2f", seconds) + " s");
    }
    if (!v.passed) {
        ++failures;
    }
    std::printf("criterion %d %s: %s (%s)\n", id, v.passed ? "PASS" : "FAIL", title, v.detail.c_str());
    std::fflush(stdout);
}

double relative(double a, double b)
{
    return std::fabs(a - b) / std::fabs(b);
}

std::vector<double> tenths()
{
    std::vector<double> v;
    for (int i = 1; i <= 9; ++i) {
        v.push_back(0.1 * i);
    }
    return v;
}

// J_nu'(z) = (nu/z) J_nu(z) - J_{nu+1}(z)
double j_derivative(double nu, double z)
{
    return nu / z * specfun::bessel_j({nu}, z) - specfun::bessel_j({nu + 1.0}, z);
}

Verdict c1()
{
    double worst = 0.0;
    for (double t : {0.05, 0.1, 0.5, 1.0}) {
        for (double x : tenths()) {
            for (double y : tenths()) {
                const double g = kernels::eigen_series_kernel({{-0.5}, t, x, y}).value;
                worst = std::max(worst, relative(g, kernels::images_neumann_dirichlet(2.0 * t, x, y)));
            }
        }
    }
    Verdict v;
    v.require(worst <= 1e-9, "max relative difference " + fmt("%.3g", worst) + " <= 1e-9");
    return v;
}

Verdict c2()
{
    double worst = 0.0;
    for (double t : {0.05, 0.1, 0.5, 1.0}) {
        for (double x : tenths()) {
            for (double y : tenths()) {
                const double k = kernels::killed_density({-0.5}, t, x, y).value;
                worst = std::max(worst, relative(k, kernels::images_dirichlet(t, x, y)));
            }
        }
    }
    Verdict v;
    v.require(worst <= 1e-9, "max relative difference " + fmt("%.3g", worst) + " <= 1e-9");
    return v;
}

Verdict c3()
{
    Verdict v;
    for (double nu : kOrders) {
        const SemigroupReport r = semigroup_check({nu}, 0.2, 0.3, 0.4, 0.6, 2000);
        v.require(r.defect <= 1e-6, "nu=" + fmt("%g", nu) + " defect " + fmt("%.2g", r.defect));
    }
    return v;
}

Verdict c4()
{
    Verdict v;
    const Grid grid = Grid::standard();
    for (double nu : kOrders) {
        const RatioReport a = ratio_scan({nu}, grid, KernelKind::main);
        const RatioReport b = ratio_scan({nu}, grid, KernelKind::main);
        const bool stable = a.argmin == b.argmin && a.argmax == b.argmax && a.ratio_min == b.ratio_min &&
                            a.ratio_max == b.ratio_max;
        const bool ok = a.ratio_min > 0.0 && a.ratio_min <= a.ratio_max && a.spread() <= 1e3 && stable;
        v.require(ok, "nu=" + fmt("%g", nu) + " spread " + fmt("%.4g", a.spread()) + " over " +
                          std::to_string(a.counted) + " nodes" + (stable ? "" : " (unstable extremes)"));
    }
    return v;
}

Verdict c5()
{
    Verdict v;
    const InequalityReport r = inequality_suite(100000, 7);
    for (const InequalityResult& res : r.results) {
        v.require(res.violations.empty() && res.samples == 100000,
                  res.name + " " + std::to_string(res.violations.size()) + " violations in " +
                      std::to_string(res.samples));
    }
    return v;
}

Verdict c6()
{
    Verdict v;
    for (double nu : {-0.5, 0.0, 2.0}) {
        const double l = specfun::bessel_j_zero({nu}, 1);
        const double l2 = l * l;
        const LargeTimeReport r = large_time_check({nu}, 0.5, 0.5, {2.0 / l2, 4.0 / l2, 8.0 / l2});
        const double gap = r.entries.front().relative_gap;
        bool decreasing = true;
        for (std::size_t i = 1; i < r.entries.size(); ++i) {
            decreasing = decreasing && r.entries[i].relative_gap < r.entries[i - 1].relative_gap;
        }
        v.require(gap <= 1e-6 && decreasing && r.variation_last_pair <= 0.01,
                  "nu=" + fmt("%g", nu) + " gap " + fmt("%.2g", gap) + (decreasing ? " decreasing" : " not decreasing") +
                      ", variation " + fmt("%.2g", r.variation_last_pair));
    }
    return v;
}

Verdict c7()
{
    PathEnsembleConfig c;
    c.nu = {0.0};
    c.start_x = 0.3;
    c.horizon_t = 0.5;
    c.step_h = 1e-3;
    c.paths = 200000;
    c.boundary_at_zero = ZeroBoundary::reflect;
    c.boundary_at_one = OneBoundary::kill;
    c.seed = 20240607;
    const HistogramDensity a = simulate_density(c, 40);
    const HistogramDensity b = simulate_density(c, 40);
    const auto cmp = compare_histogram(a, [](double y) { return kernels::reflected_density({{0.0}, 0.5, 0.3, y}).value; });
    const bool identical = a.counts == b.counts && a.estimates == b.estimates && a.std_errors == b.std_errors &&
                           a.killed == b.killed;
    Verdict v;
    v.require(cmp.fraction_within() >= 0.95, std::to_string(cmp.within_3sigma) + "/" + std::to_string(cmp.occupied) +
                                                 " occupied bins within 3 standard errors");
    v.require(identical, identical ? "repeat bit-identical" : "repeat differs");
    return v;
}

Verdict c8()
{
    Verdict v;
    double worst_residual = 0.0;
    bool interlaced = true;
    for (double nu : kOrders) {
        specfun::BesselZeroSequence seq({nu});
        specfun::BesselZeroSequence up({nu + 1.0});
        std::vector<double> a;
        std::vector<double> b;
        for (int n = 1; n <= 51; ++n) {
            a.push_back(seq.next());
            b.push_back(up.next());
        }
        for (int n = 0; n < 50; ++n) {
            const double scale = std::max(1.0, std::fabs(j_derivative(nu, a[n])) * a[n]);
            worst_residual = std::max(worst_residual, std::fabs(specfun::bessel_j({nu}, a[n])) / scale);
            interlaced = interlaced && a[n] < b[n] && b[n] < a[n + 1];
        }
    }
    v.require(worst_residual <= 1e-12, "zero residual " + fmt("%.2g", worst_residual));
    v.require(interlaced, interlaced ? "interlacing holds" : "interlacing broken");

    double worst_closed = 0.0;
    for (double z = 0.1; z <= 50.0; z += 0.0731) {
        const double amp = std::sqrt(2.0 / (kPi * z));
        worst_closed = std::max(worst_closed, std::fabs(specfun::bessel_j({0.5}, z) - amp * std::sin(z)) / amp);
        worst_closed = std::max(worst_closed, std::fabs(specfun::bessel_j({-0.5}, z) - amp * std::cos(z)) / amp);
        const double e = std::exp(-2.0 * z);
        worst_closed = std::max(worst_closed, relative(specfun::bessel_i_scaled({0.5}, z), amp * 0.5 * (1.0 - e)));
        worst_closed = std::max(worst_closed, relative(specfun::bessel_i_scaled({-0.5}, z), amp * 0.5 * (1.0 + e)));
    }
    v.require(worst_closed <= 1e-12, "closed forms " + fmt("%.2g", worst_closed));

    for (double nu : kOrders) {
        const AsymptoticsReport r = asymptotics_check({nu});
        double worst = 0.0;
        for (const AsymptoticEntry& e : r.entries) {
            worst = std::max(worst, e.deviation / e.tolerance);
        }
        v.require(r.passed, "asymptotics nu=" + fmt("%g", nu) + " worst deviation/tolerance " + fmt("%.3g", worst));
    }
    return v;
}

}  // namespace

int main()
{
    criterion(1, "index -1/2 series equals the cosine expansion", 10.0, c1);
    criterion(2, "killed index -1/2 equals the Dirichlet images", 0.0, c2);
    criterion(3, "Chapman-Kolmogorov defect", 30.0, c3);
    criterion(4, "ratio band on the standard grid", 60.0, c4);
    criterion(5, "inequality suites", 10.0, c5);
    criterion(6, "large-time behavior", 0.0, c6);
    criterion(7, "Monte Carlo concordance", 60.0, c7);
    criterion(8, "special-function layer", 0.0, c8);
    std::printf("%d of 8 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
