#include "besselheat/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "besselheat/errors.hpp"

namespace besselheat {
namespace kernels {
namespace {

constexpr double kPi = 3.14159265358979323846;

void require_time(double t, const char* where)
{
    if (!(t > 0.0) || !std::isfinite(t)) {
        throw DomainError(std::string(where) + ": requires t > 0");
    }
}

void require_unit_closed(double v, const char* name, const char* where)
{
    if (!(v >= 0.0 && v <= 1.0)) {
        throw DomainError(std::string(where) + ": requires 0 <= " + name + " <= 1");
    }
}

void require_unit_open(double v, const char* name, const char* where)
{
    if (!(v > 0.0 && v < 1.0)) {
        throw DomainError(std::string(where) + ": requires 0 < " + name + " < 1");
    }
}

// Modes of one order: a shared read-only prefix plus locally computed extras.
class ModeSource {
public:
    ModeSource(Order order, const specfun::ModeTable* table) : order_(order), seq_(order)
    {
        if (table != nullptr && table->size() > 0) {
            if (table->order().nu != order.nu) {
                throw ConfigError("mode table order does not match the kernel index");
            }
            table_ = table;
            seq_ = specfun::BesselZeroSequence(order, static_cast<int>(table->size()),
                                               (*table)[table->size() - 1].lambda);
        }
    }

    EigenMode get(std::size_t i)
    {
        const std::size_t base = table_ != nullptr ? table_->size() : 0;
        if (i < base) {
            return (*table_)[i];
        }
        while (extra_.size() <= i - base) {
            const int n = seq_.count() + 1;
            extra_.push_back(specfun::make_eigen_mode(order_, n, seq_.next()));
        }
        return extra_[i - base];
    }

private:
    Order order_;
    const specfun::ModeTable* table_ = nullptr;
    specfun::BesselZeroSequence seq_;
    std::vector<EigenMode> extra_;
};

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

// Upper bound for sum_{n > N} W lambda_n exp(-lambda_n^2 t) E_x(lambda_n) E_y(lambda_n)
// with E_x(lambda) = a lambda^nu + b_x lambda^{-1/2}, given L = lambda_{N+1}.
class TailBound {
public:
    TailBound(Order nu, double x, double y) : nu_(nu.nu)
    {
        const double a = TailEnvelope::small_argument_bound(nu);
        const double bx = large_argument_coefficient(x);
        const double by = large_argument_coefficient(y);
        coeff_[0] = a * a;
        coeff_[1] = a * (bx + by);
        coeff_[2] = bx * by;
        power_[0] = 2.0 * nu_ + 1.0;
        power_[1] = nu_ + 0.5;
        power_[2] = 0.0;
    }

    // Infinite until L is past the maximum of every lambda^q exp(-t lambda^2).
    double operator()(double next_lambda, double t) const
    {
        const double spacing = kPi * (1.0 - TailEnvelope::spacing_slack);
        double total = 0.0;
        for (int i = 0; i < 3; ++i) {
            if (coeff_[i] == 0.0) {
                continue;
            }
            const double decay = 2.0 * t * next_lambda - std::max(power_[i], 0.0) / next_lambda;
            if (!(decay > 0.0)) {
                return std::numeric_limits<double>::infinity();
            }
            const double lead = std::exp(power_[i] * std::log(next_lambda) - t * next_lambda * next_lambda);
            total += coeff_[i] * lead * (1.0 + 1.0 / (spacing * decay));
        }
        return TailEnvelope::weight_slope * total;
    }

private:
    double large_argument_coefficient(double v) const
    {
        if (v == 0.0) {
            return 0.0;
        }
        return TailEnvelope::amplitude * std::exp((-nu_ - 0.5) * std::log(v));
    }

    double nu_;
    double coeff_[3] = {};
    double power_[3] = {};
};

double first_zero(Order nu) { return specfun::bessel_j_zero(nu, 1); }

// log of (1+t)^{p+2} / (t+xy)^{p+1/2} (1 ^ (1-x)(1-y)/t) t^{-1/2}
//        * exp(-|x-y|^2 / (spread t) - lambda1^2 t / decay_div)
double comparator_log(double p, double t, double x, double y, double spread, double lambda1, double decay_div)
{
    const double boundary = std::min(1.0, (1.0 - x) * (1.0 - y) / t);
    const double d = x - y;
    return (p + 2.0) * std::log1p(t) - (p + 0.5) * std::log(t + x * y) + std::log(boundary) -
           0.5 * std::log(t) - d * d / (spread * t) - lambda1 * lambda1 * t / decay_div;
}

// Size of z^{-nu} J_nu(z) for error estimates: the value itself where J is
// monotone, the oscillation amplitude beyond.
double normalized_amplitude(double nu, double z, double value)
{
    if (z <= std::max(1.0, nu)) {
        return std::fabs(value);
    }
    return std::max(std::fabs(value), std::sqrt(2.0 / (kPi * z)) * std::exp(-nu * std::log(z)));
}

// Relative error of one term measured against its amplitude; covers the
// accuracy of bessel_j near its zeros and the exponent of the prefactor.
constexpr double kTermRounding = 4096.0 * std::numeric_limits<double>::epsilon() / 2.0;

void require_comparator_query(double t, double x, double y, const char* where)
{
    require_time(t, where);
    require_unit_open(x, "x", where);
    require_unit_open(y, "y", where);
}

}  // namespace

double TailEnvelope::small_argument_bound(Order nu)
{
    return amplitude * std::pow(2.0, -nu.nu) * (1.0 / std::tgamma(nu.nu + 1.0) + 0.33);
}

double eigen_series_term(const KernelQuery& q, const EigenMode& mode)
{
    const double nu = q.nu.nu;
    const double lambda = mode.lambda;
    const double scale = std::exp(std::log(mode.weight) - lambda * lambda * q.t + 2.0 * nu * std::log(lambda));
    return scale * (specfun::bessel_j_normalized(q.nu, lambda * q.x) * specfun::bessel_j_normalized(q.nu, lambda * q.y));
}

SeriesValue eigen_series_kernel(const KernelQuery& q, const SeriesOptions& options)
{
    constexpr const char* where = "eigen_series_kernel";
    require_bessel_order(q.nu, where);
    require_time(q.t, where);
    require_unit_closed(q.x, "x", where);
    require_unit_closed(q.y, "y", where);
    if (!(options.eps > 0.0)) {
        throw DomainError("eigen_series_kernel: requires eps > 0");
    }
    if (q.x == 1.0 || q.y == 1.0) {
        return SeriesValue{0.0, 0, 0.0};
    }

    ModeSource modes(q.nu, options.modes);
    EigenMode mode = modes.get(0);
    const double gap = mode.lambda * mode.lambda * q.t;
    if (gap < options.floor) {
        throw IllConditioned("eigen_series_kernel: lambda_1^2 t = " + std::to_string(gap) +
                             " is below the series floor " + std::to_string(options.floor));
    }
    const double scale_floor = std::exp(-gap);
    const TailBound tail(q.nu, q.x, q.y);

    const double nu = q.nu.nu;
    Accumulator acc;
    double amplitude_sum = 0.0;
    for (int n = 1; n <= options.max_terms; ++n) {
        const double lambda = mode.lambda;
        const double scale = std::exp(std::log(mode.weight) - lambda * lambda * q.t + 2.0 * nu * std::log(lambda));
        const double jx = specfun::bessel_j_normalized(q.nu, lambda * q.x);
        const double jy = specfun::bessel_j_normalized(q.nu, lambda * q.y);
        acc.add(scale * (jx * jy));
        amplitude_sum += scale * (normalized_amplitude(nu, lambda * q.x, jx) * normalized_amplitude(nu, lambda * q.y, jy));

        const EigenMode next = modes.get(static_cast<std::size_t>(n));
        const double bound = tail(next.lambda, q.t);
        const double value = acc.value();
        if (bound <= options.eps * std::max(std::fabs(value), scale_floor)) {
            return SeriesValue{value, n, bound, kTermRounding * amplitude_sum};
        }
        mode = next;
    }
    throw IterationFailure("eigen_series_kernel: tail bound not reached within max_terms");
}

SeriesValue eigen_series_kernel(const KernelQuery& q, double eps)
{
    SeriesOptions options;
    options.eps = eps;
    return eigen_series_kernel(q, options);
}

double comparator_main(const KernelQuery& q, double lambda1)
{
    require_comparator_query(q.t, q.x, q.y, "comparator_main");
    return std::exp(comparator_log(q.nu.nu, q.t, q.x, q.y, 4.0, lambda1, 1.0));
}

double comparator_main(const KernelQuery& q)
{
    require_bessel_order(q.nu, "comparator_main");
    return comparator_main(q, first_zero(q.nu));
}

double comparator_reflected(const KernelQuery& q, double lambda1)
{
    require_comparator_query(q.t, q.x, q.y, "comparator_reflected");
    return std::exp(comparator_log(q.nu.nu, q.t, q.x, q.y, 2.0, lambda1, 2.0));
}

double comparator_reflected(const KernelQuery& q)
{
    require_bessel_order(q.nu, "comparator_reflected");
    return comparator_reflected(q, first_zero(q.nu));
}

double comparator_killed(Order mu, double t, double x, double y, double lambda1)
{
    if (!std::isfinite(mu.nu)) {
        throw DomainError("comparator_killed: index must be finite");
    }
    require_comparator_query(t, x, y, "comparator_killed");
    const double index = std::fabs(mu.nu);
    const double singular = std::min(0.0, -2.0 * mu.nu * std::log(x * y));
    return std::exp(comparator_log(index, t, x, y, 2.0, lambda1, 2.0) + singular);
}

double comparator_killed(Order mu, double t, double x, double y)
{
    if (!std::isfinite(mu.nu)) {
        throw DomainError("comparator_killed: index must be finite");
    }
    return comparator_killed(mu, t, x, y, first_zero(Order{std::fabs(mu.nu)}));
}

double free_density(const KernelQuery& q)
{
    constexpr const char* where = "free_density";
    require_bessel_order(q.nu, where);
    require_time(q.t, where);
    if (!(q.x >= 0.0) || !(q.y >= 0.0) || !std::isfinite(q.x) || !std::isfinite(q.y)) {
        throw DomainError("free_density: requires x >= 0 and y >= 0");
    }
    const double nu = q.nu.nu;
    if (q.x == 0.0 && q.y == 0.0 && nu < 0.0) {
        throw PoleError("free_density: x = y = 0 is not evaluated for nu < 0");
    }
    if (q.x == 0.0 || q.y == 0.0) {
        const double r = q.x + q.y;
        return std::exp(-nu * std::log(2.0) - (nu + 1.0) * std::log(q.t) - std::lgamma(nu + 1.0) -
                        r * r / (2.0 * q.t));
    }
    const double xy = q.x * q.y;
    const double d = q.x - q.y;
    return std::exp(-nu * std::log(xy) - std::log(q.t) - d * d / (2.0 * q.t) +
                    specfun::log_bessel_i_scaled(q.nu, xy / q.t));
}

double free_density_comparator(const KernelQuery& q)
{
    constexpr const char* where = "free_density_comparator";
    require_bessel_order(q.nu, where);
    require_time(q.t, where);
    if (!(q.x >= 0.0) || !(q.y >= 0.0)) {
        throw DomainError("free_density_comparator: requires x >= 0 and y >= 0");
    }
    const double d = q.x - q.y;
    return std::exp(-(q.nu.nu + 0.5) * std::log(q.x * q.y + q.t) - 0.5 * std::log(q.t) - d * d / (2.0 * q.t));
}

SeriesValue reflected_density(const KernelQuery& q, const SeriesOptions& options)
{
    require_time(q.t, "reflected_density");
    return eigen_series_kernel(KernelQuery{q.nu, q.t / 2.0, q.x, q.y}, options);
}

SeriesValue killed_density(Order mu, double t, double x, double y, const SeriesOptions& options)
{
    constexpr const char* where = "killed_density";
    if (!std::isfinite(mu.nu)) {
        throw DomainError("killed_density: index must be finite");
    }
    require_time(t, where);
    require_unit_closed(x, "x", where);
    require_unit_closed(y, "y", where);
    if (mu.nu >= 0.0) {
        return reflected_density(KernelQuery{mu, t, x, y}, options);
    }
    SeriesValue mirrored = reflected_density(KernelQuery{Order{-mu.nu}, t, x, y}, options);
    // p^(mu) = (xy)^{-2 mu} p^(-mu)
    const double factor = std::pow(x * y, -2.0 * mu.nu);
    mirrored.value *= factor;
    mirrored.tail_bound *= factor;
    mirrored.rounding_estimate *= factor;
    return mirrored;
}

double hunt_remainder(const KernelQuery& q, const SeriesOptions& options)
{
    const SeriesValue killed = reflected_density(q, options);
    const double free = free_density(q);
    const double remainder = free - killed.value;
    if (remainder >= 0.0) {
        return remainder;
    }
    const double rounding = 1e-11 * std::max(free, std::fabs(killed.value));
    if (remainder >= -(killed.error_estimate() + rounding)) {
        return 0.0;
    }
    throw NumericalError("hunt_remainder: reflected density exceeds the free density by " +
                         std::to_string(-remainder) + " (tail bound " + std::to_string(killed.tail_bound) + ")");
}

}  // namespace kernels
}  // namespace besselheat
