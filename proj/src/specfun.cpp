#include "besselheat/specfun.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "besselheat/errors.hpp"

namespace besselheat {

void require_bessel_order(Order order, const char* where)
{
    if (!std::isfinite(order.nu) || order.nu <= -1.0) {
        throw DomainError(std::string(where) + ": requires nu > -1 (got nu = " +
                          std::to_string(order.nu) + ")");
    }
}

namespace specfun {
namespace {

using ld = long double;

constexpr double kSeriesLimit = 17.0;
constexpr double kHankelMaxOrder = 4.0;
constexpr ld kPi = std::numbers::pi_v<long double>;
constexpr ld kLdEps = std::numeric_limits<ld>::epsilon();

// Neumaier-compensated accumulator.
struct CompensatedSum {
    ld sum = 0.0L;
    ld carry = 0.0L;

    void add(ld v)
    {
        const ld t = sum + v;
        if (std::fabs(sum) >= std::fabs(v)) {
            carry += (sum - t) + v;
        } else {
            carry += (v - t) + sum;
        }
        sum = t;
    }
    ld value() const { return sum + carry; }
};

void require_nonnegative(double z, const char* where)
{
    if (!(z >= 0.0) || !std::isfinite(z)) {
        throw DomainError(std::string(where) + ": requires z >= 0 (got z = " +
                          std::to_string(z) + ")");
    }
}

// z^{-nu} J_nu(z) = 2^{-nu} sum_k (-z^2/4)^k / (k! Gamma(k+nu+1)).
ld j_series_normalized(ld nu, ld z)
{
    const ld q = z * z / 4.0L;
    ld term = 1.0L / std::tgamma(nu + 1.0L);
    ld peak = std::fabs(term);
    CompensatedSum acc;
    acc.add(term);
    for (int k = 1; k < 1000; ++k) {
        term *= -q / (static_cast<ld>(k) * (static_cast<ld>(k) + nu));
        acc.add(term);
        const ld mag = std::fabs(term);
        if (mag > peak) {
            peak = mag;
        }
        if (k > q && mag <= kLdEps * 1e-3L * peak) {
            break;
        }
    }
    return acc.value() * std::pow(2.0L, -nu);
}

// Hankel large-argument series P(nu, z), Q(nu, z).
void hankel_pq(ld nu, ld z, ld& p, ld& q)
{
    const ld mu = 4.0L * nu * nu;
    ld term = 1.0L;
    ld prev = 1.0L;
    p = 1.0L;
    q = 0.0L;
    for (int k = 1; k < 400; ++k) {
        const ld odd = 2.0L * k - 1.0L;
        const ld next = term * (mu - odd * odd) / (8.0L * k * z);
        if (odd * odd > mu && std::fabs(next) > prev) {
            break;  // asymptotic series starts to diverge
        }
        term = next;
        switch (k % 4) {
        case 1: q += term; break;
        case 2: p -= term; break;
        case 3: q -= term; break;
        default: p += term; break;
        }
        prev = std::fabs(term);
        if (prev < kLdEps * 1e-3L) {
            break;
        }
    }
}

ld j_hankel(ld nu, ld z)
{
    ld p = 0.0L;
    ld q = 0.0L;
    hankel_pq(nu, z, p, q);
    const ld chi = z - (nu / 2.0L + 0.25L) * kPi;
    return std::sqrt(2.0L / (kPi * z)) * (p * std::cos(chi) - q * std::sin(chi));
}

// J_nu(z) for z > max(kSeriesLimit, nu).
ld j_large(ld nu, ld z)
{
    if (nu <= kHankelMaxOrder) {
        return j_hankel(nu, z);
    }
    // Forward recurrence is stable while the order stays below z.
    const int steps = static_cast<int>(std::floor(nu));
    const ld base = nu - steps;
    ld lower = j_hankel(base, z);
    ld upper = j_hankel(base + 1.0L, z);
    for (int k = 1; k < steps; ++k) {
        const ld next = 2.0L * (base + k) / z * upper - lower;
        lower = upper;
        upper = next;
    }
    return upper;
}

bool use_series(double nu, double z)
{
    return z <= kSeriesLimit || z <= nu;
}

// log of sum_k (z/2)^{2k} Gamma(nu+1) / (k! Gamma(k+nu+1)) = log[I_nu(z) Gamma(nu+1) (z/2)^{-nu}]
ld log_i_series_factor(ld nu, ld z)
{
    const ld q = z * z / 4.0L;
    ld term = 1.0L;
    CompensatedSum acc;
    acc.add(term);
    for (int k = 1; k < 100000; ++k) {
        term *= q / (static_cast<ld>(k) * (static_cast<ld>(k) + nu));
        acc.add(term);
        if (k > q && term <= kLdEps * 1e-3L * acc.value()) {
            break;
        }
    }
    return std::log(acc.value());
}

ld log_i_scaled(ld nu, ld z)
{
    if (z <= 30.0L + nu * nu) {
        return nu * std::log(z / 2.0L) - std::lgamma(nu + 1.0L) + log_i_series_factor(nu, z) - z;
    }
    // e^{-z} I_nu(z) ~ (2 pi z)^{-1/2} sum_k (-1)^k a_k(nu) / z^k
    const ld mu = 4.0L * nu * nu;
    ld term = 1.0L;
    ld prev = 1.0L;
    CompensatedSum acc;
    acc.add(1.0L);
    for (int k = 1; k < 400; ++k) {
        const ld odd = 2.0L * k - 1.0L;
        const ld next = -term * (mu - odd * odd) / (8.0L * k * z);
        if (odd * odd > mu && std::fabs(next) > prev) {
            break;
        }
        term = next;
        acc.add(term);
        prev = std::fabs(term);
        if (prev < kLdEps * 1e-3L) {
            break;
        }
    }
    return -0.5L * std::log(2.0L * kPi * z) + std::log(acc.value());
}

}  // namespace

double series_limit() { return kSeriesLimit; }

double bessel_j_series_branch(Order order, double z)
{
    require_bessel_order(order, "bessel_j_series_branch");
    require_nonnegative(z, "bessel_j_series_branch");
    return static_cast<double>(j_series_normalized(order.nu, z) * std::pow(static_cast<ld>(z), order.nu));
}

double bessel_j_asymptotic_branch(Order order, double z)
{
    require_bessel_order(order, "bessel_j_asymptotic_branch");
    if (!(z > 0.0)) {
        throw DomainError("bessel_j_asymptotic_branch: requires z > 0");
    }
    return static_cast<double>(j_hankel(order.nu, z));
}

double bessel_j_normalized(Order order, double z)
{
    require_bessel_order(order, "bessel_j_normalized");
    require_nonnegative(z, "bessel_j_normalized");
    if (use_series(order.nu, z)) {
        return static_cast<double>(j_series_normalized(order.nu, z));
    }
    const ld zl = z;
    return static_cast<double>(j_large(order.nu, zl) * std::exp(-order.nu * std::log(zl)));
}

double bessel_j(Order order, double z)
{
    require_bessel_order(order, "bessel_j");
    require_nonnegative(z, "bessel_j");
    if (z == 0.0) {
        if (order.nu == 0.0) {
            return 1.0;
        }
        if (order.nu > 0.0) {
            return 0.0;
        }
        throw PoleError("bessel_j: J_nu(0) is infinite for nu < 0");
    }
    if (use_series(order.nu, z)) {
        return static_cast<double>(j_series_normalized(order.nu, z) *
                                   std::pow(static_cast<ld>(z), static_cast<ld>(order.nu)));
    }
    return static_cast<double>(j_large(order.nu, z));
}

double log_bessel_i_scaled(Order order, double z)
{
    require_bessel_order(order, "log_bessel_i_scaled");
    require_nonnegative(z, "log_bessel_i_scaled");
    if (z == 0.0) {
        if (order.nu == 0.0) {
            return 0.0;
        }
        if (order.nu > 0.0) {
            return -std::numeric_limits<double>::infinity();
        }
        throw PoleError("log_bessel_i_scaled: I_nu(0) is infinite for nu < 0");
    }
    return static_cast<double>(log_i_scaled(order.nu, z));
}

double bessel_i_scaled(Order order, double z)
{
    require_bessel_order(order, "bessel_i_scaled");
    require_nonnegative(z, "bessel_i_scaled");
    if (z == 0.0) {
        if (order.nu == 0.0) {
            return 1.0;
        }
        if (order.nu > 0.0) {
            return 0.0;
        }
        throw PoleError("bessel_i_scaled: I_nu(0) is infinite for nu < 0");
    }
    return static_cast<double>(std::exp(log_i_scaled(order.nu, z)));
}

// ---------------------------------------------------------------------------
// zeros

BesselZeroSequence::BesselZeroSequence(Order order) : order_(order)
{
    require_bessel_order(order, "BesselZeroSequence");
}

BesselZeroSequence::BesselZeroSequence(Order order, int found, double last_zero)
    : order_(order), found_(found), last_(last_zero)
{
    require_bessel_order(order, "BesselZeroSequence");
    if (found < 0 || (found > 0 && !(last_zero > 0.0))) {
        throw DomainError("BesselZeroSequence: invalid resume point");
    }
}

double BesselZeroSequence::next()
{
    const Order upper{order_.nu + 1.0};
    const auto g = [this](double z) { return bessel_j_normalized(order_, z); };

    // j_{nu,1} > nu for nu > 0.
    double a = found_ == 0 ? std::max(0.0, order_.nu) : last_ + 2.5;
    double ga = g(a);
    double b = a;
    double gb = ga;
    for (int i = 0;; ++i) {
        if (i > 4096) {
            throw IterationFailure("bessel_j_zero: no sign change found while bracketing zero " +
                                   std::to_string(found_ + 1));
        }
        b = a + 0.5;
        gb = g(b);
        if ((ga > 0.0) != (gb > 0.0) || gb == 0.0) {
            break;
        }
        a = b;
        ga = gb;
    }
    if (gb == 0.0) {
        last_ = b;
        ++found_;
        return b;
    }

    // Newton on g(z) = z^{-nu} J_nu(z), g'(z) = -z * (z^{-nu-1} J_{nu+1}(z)),
    // safeguarded by the bracket [a, b].
    double z = 0.5 * (a + b);
    for (int it = 0; it < 200; ++it) {
        const double gz = g(z);
        if (gz == 0.0) {
            break;
        }
        if ((gz > 0.0) == (ga > 0.0)) {
            a = z;
            ga = gz;
        } else {
            b = z;
        }
        const double slope = -z * bessel_j_normalized(upper, z);
        double candidate = slope != 0.0 ? z - gz / slope : a - 1.0;
        if (!(candidate > a && candidate < b)) {
            candidate = 0.5 * (a + b);
        }
        const double step = std::fabs(candidate - z);
        z = candidate;
        if (step <= 4.0 * std::numeric_limits<double>::epsilon() * z || b - a <= 4.0 * std::numeric_limits<double>::epsilon() * b) {
            last_ = z;
            ++found_;
            return z;
        }
    }
    throw IterationFailure("bessel_j_zero: Newton/bisection did not converge for zero " +
                           std::to_string(found_ + 1));
}

double bessel_j_zero(Order order, int n)
{
    require_bessel_order(order, "bessel_j_zero");
    if (n < 1) {
        throw DomainError("bessel_j_zero: requires n >= 1");
    }
    BesselZeroSequence seq(order);
    double z = 0.0;
    for (int i = 0; i < n; ++i) {
        z = seq.next();
    }
    return z;
}

EigenMode make_eigen_mode(Order order, int n, double lambda)
{
    const double upper = bessel_j(Order{order.nu + 1.0}, lambda);
    return EigenMode{n, lambda, 2.0 / (upper * upper)};
}

EigenMode eigen_mode(Order order, int n)
{
    return make_eigen_mode(order, n, bessel_j_zero(order, n));
}

ModeTable::ModeTable(Order order, int count) : order_(order)
{
    require_bessel_order(order, "ModeTable");
    if (count < 1) {
        throw DomainError("ModeTable: requires count >= 1");
    }
    modes_.reserve(static_cast<std::size_t>(count));
    BesselZeroSequence seq(order);
    for (int n = 1; n <= count; ++n) {
        modes_.push_back(make_eigen_mode(order, n, seq.next()));
    }
}

}  // namespace specfun
}  // namespace besselheat
