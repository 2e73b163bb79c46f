#include <algorithm>
#include <cmath>
#include <string>

#include "besselheat/errors.hpp"
#include "besselheat/kernels.hpp"

namespace besselheat {
namespace kernels {
namespace {

constexpr double kPi = 3.14159265358979323846;

struct Accumulator {
    double sum = 0.0;
    double carry = 0.0;

    void add(double v)
    {
        const double t = sum + v;
        if (std::fabs(sum) >= std::fabs(v)) {
            carry += (sum - t) + v;
        } else {
            carry += (v - t) + sum;
        }
        sum = t;
    }
    double value() const { return sum + carry; }
};

void require_interval_point(double v, const char* name, const char* where)
{
    if (!(v >= 0.0 && v <= 1.0)) {
        throw DomainError(std::string(where) + ": requires 0 <= " + name + " <= 1");
    }
}

}  // namespace

double images_dirichlet(double t, double x, double y)
{
    constexpr const char* where = "images_dirichlet";
    if (!(t > 0.0) || !std::isfinite(t)) {
        throw DomainError("images_dirichlet: requires t > 0");
    }
    require_interval_point(x, "x", where);
    require_interval_point(y, "y", where);
    if (x == 0.0 || y == 0.0 || x == 1.0 || y == 1.0) {
        return 0.0;
    }

    // |x+-y-2n| >= 2|n| - 2, so the images beyond K sum to at most
    // 4 phi(2K) / (1 - exp(-(4K+2)/t)); K makes that < 1e-17 phi(0).
    const double cutoff = std::log(4.0e17);
    const int images = static_cast<int>(std::ceil(std::sqrt(2.0 * t * cutoff) / 2.0)) + 1;

    const double d = std::fabs(x - y);
    const double s = x + y;
    const double norm = 1.0 / std::sqrt(2.0 * kPi * t);
    const auto phi = [t](double u) { return std::exp(-u * u / (2.0 * t)); };

    Accumulator same;
    Accumulator mirrored;
    same.add(phi(d));
    mirrored.add(phi(s));
    for (int n = 1; n <= images; ++n) {
        const double shift = 2.0 * n;
        same.add(phi(d - shift));
        same.add(phi(d + shift));
        mirrored.add(phi(s - shift));
        mirrored.add(phi(s + shift));
    }
    return norm * (same.value() - mirrored.value());
}

double images_dirichlet_interval(double a, double b, double t, double x, double y)
{
    if (!(a >= 0.0) || !(b > a) || !std::isfinite(b)) {
        throw DomainError("images_dirichlet_interval: requires 0 <= a < b");
    }
    if (!(x > a && x < b) || !(y > a && y < b)) {
        throw DomainError("images_dirichlet_interval: requires x, y in (a, b)");
    }
    if (!(t > 0.0)) {
        throw DomainError("images_dirichlet_interval: requires t > 0");
    }
    const double width = b - a;
    return images_dirichlet(t / (width * width), (x - a) / width, (y - a) / width) / width;
}

double images_neumann_dirichlet(double t, double x, double y, double floor)
{
    constexpr const char* where = "images_neumann_dirichlet";
    if (!(t > 0.0) || !std::isfinite(t)) {
        throw DomainError("images_neumann_dirichlet: requires t > 0");
    }
    require_interval_point(x, "x", where);
    require_interval_point(y, "y", where);

    const double first = 0.5 * kPi;
    const double gap = first * first * t / 2.0;
    if (gap < floor) {
        throw IllConditioned("images_neumann_dirichlet: (pi/2)^2 t/2 = " + std::to_string(gap) +
                             " is below the series floor " + std::to_string(floor));
    }
    if (x == 1.0 || y == 1.0) {
        return 0.0;
    }

    Accumulator acc;
    const double scale = 2.0 * std::exp(-gap);
    for (int n = 1; n < 1000000; ++n) {
        const double k = (n - 0.5) * kPi;
        acc.add(2.0 * std::exp(-k * k * t / 2.0) * (std::cos(k * x) * std::cos(k * y)));
        // remaining terms: ratio of consecutive weights <= exp(-pi^2 t (n+1))
        const double next = (n + 0.5) * kPi;
        const double ratio = std::exp(-kPi * kPi * t * (n + 1));
        const double tail = 2.0 * std::exp(-next * next * t / 2.0) / (1.0 - ratio);
        if (tail <= 1e-17 * std::max(std::fabs(acc.value()), scale)) {
            return acc.value();
        }
    }
    throw IterationFailure("images_neumann_dirichlet: series did not converge");
}

}  // namespace kernels
}  // namespace besselheat
