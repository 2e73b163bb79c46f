#pragma once

#include <cmath>

#include "besselheat/specfun.hpp"

namespace besselheat {

/// Time and space point at which a kernel of index `nu` is evaluated.
struct KernelQuery {
    Order nu;
    double t = 0.0;
    double x = 0.0;
    double y = 0.0;
};

/// A truncated series together with a bound on the dropped remainder.
///
/// tail_bound covers truncation only.  rounding_estimate is a separate,
/// non-rigorous estimate of the floating-point error of the partial sum
/// (it matters when the terms cancel, e.g. large nu at small t).
struct SeriesValue {
    double value = 0.0;
    int terms_used = 0;
    double tail_bound = 0.0;
    double rounding_estimate = 0.0;

    double error_estimate() const { return tail_bound + rounding_estimate; }
    bool ill_conditioned() const { return error_estimate() > std::fabs(value); }
};

/// m^(nu)(dy) = y^{2nu+1} dy.
struct SpeedMeasure {
    Order nu;

    double density(double y) const { return std::pow(y, 2.0 * nu.nu + 1.0); }
    /// m^(nu)([a, b]) for 0 <= a <= b.
    double mass(double a, double b) const
    {
        const double p = 2.0 * nu.nu + 2.0;
        return (std::pow(b, p) - std::pow(a, p)) / p;
    }
};

namespace kernels {

inline constexpr double kDefaultEps = 1e-12;
inline constexpr double kDefaultSeriesFloor = 0.05;

struct SeriesOptions {
    /// Relative accuracy target for the certified tail bound.
    double eps = kDefaultEps;
    /// The series is refused when lambda_{1,nu}^2 t falls below this value.
    double floor = kDefaultSeriesFloor;
    /// Optional precomputed modes of the same order; extended on the fly.
    const specfun::ModeTable* modes = nullptr;
    int max_terms = 100000;
};

/// Constants of the certified envelope used for the series tail.
struct TailEnvelope {
    /// |J_nu(z)| <= A z^{-1/2} for z >= 1, and
    /// |z^{-nu} J_nu(z)| <= A 2^{-nu} (1/Gamma(nu+1) + 0.33) for z <= 1.
    static constexpr double amplitude = 2.0;
    /// 2 / J_{nu+1}(lambda_n)^2 <= W lambda_n for n >= 2.
    static constexpr double weight_slope = 2.0 * 3.14159265358979323846;
    /// lambda_{n+1} - lambda_n >= pi (1 - delta).
    static constexpr double spacing_slack = 0.1;

    /// A 2^{-nu} (1/Gamma(nu+1) + 0.33)
    static double small_argument_bound(Order nu);
};

/// Fourier-Bessel heat kernel
///   G_t(x, y) = 2 (xy)^{-nu} sum_n exp(-lambda_n^2 t) J_nu(lambda_n x) J_nu(lambda_n y) / J_{nu+1}(lambda_n)^2
/// on [0, 1)^2 (x = 0 or y = 0 taken as the removable limit; x = 1 or y = 1
/// gives exactly 0).
///
/// Terms are added until the envelope bound on the remainder drops below
/// eps * max(|value|, exp(-lambda_1^2 t)).  Throws IllConditioned when
/// lambda_1^2 t < floor, because the series cancels catastrophically there.
SeriesValue eigen_series_kernel(const KernelQuery& q, const SeriesOptions& options = {});
SeriesValue eigen_series_kernel(const KernelQuery& q, double eps);

/// The n-th term (1-based mode in `mode`) of the series above.
double eigen_series_term(const KernelQuery& q, const EigenMode& mode);

/// Sharp comparator for G_t(x, y):
///   (1+t)^{nu+2} / (t+xy)^{nu+1/2} (1 ^ (1-x)(1-y)/t) t^{-1/2} exp(-|x-y|^2/4t - lambda_1^2 t)
double comparator_main(const KernelQuery& q);
double comparator_main(const KernelQuery& q, double lambda1);

/// Comparator for the density reflected at 0 and killed at 1: as above with
/// exp(-|x-y|^2/2t - lambda_1^2 t/2).
double comparator_reflected(const KernelQuery& q);
double comparator_reflected(const KernelQuery& q, double lambda1);

/// Comparator for the density killed on leaving (0, 1), any real index mu.
/// Uses |mu| in the powers and lambda_{1,|mu|}, times 1 ^ (xy)^{-2 mu}.
double comparator_killed(Order mu, double t, double x, double y);
double comparator_killed(Order mu, double t, double x, double y, double lambda1);

/// Free Bessel transition density with respect to m^(nu):
///   (xy)^{-nu} / t exp(-(x^2+y^2)/2t) I_nu(xy/t)
/// with the origin formula when x or y is 0.  Evaluated in log space.
double free_density(const KernelQuery& q);

/// (xy+t)^{-nu-1/2} t^{-1/2} exp(-(x-y)^2/2t)
double free_density_comparator(const KernelQuery& q);

/// p_1(t, x, y) = G_{t/2}(x, y): reflected at 0, killed at 1, density w.r.t. m^(nu).
SeriesValue reflected_density(const KernelQuery& q, const SeriesOptions& options = {});

/// Density w.r.t. m^(mu) of the process killed on leaving (0, 1), any real mu.
/// mu >= 0 coincides with reflected_density; mu < 0 uses
/// p^(mu) = (xy)^{-2 mu} p^(-mu).  A mode table, if given, must have order |mu|.
SeriesValue killed_density(Order mu, double t, double x, double y, const SeriesOptions& options = {});

/// r_1 = free_density - reflected_density, clamped to 0 when it is negative
/// by less than the series tail bound (plus rounding); throws NumericalError
/// on a genuine violation.
double hunt_remainder(const KernelQuery& q, const SeriesOptions& options = {});

/// Brownian motion on (0, 1) killed at both ends, by images:
///   sum_n [phi_t(x-y-2n) - phi_t(x+y-2n)],  phi_t(u) = (2 pi t)^{-1/2} exp(-u^2/2t).
/// Accurate while t is moderate; at large t the image sum cancels.
double images_dirichlet(double t, double x, double y);

/// Rescaled images_dirichlet on (a, b).
double images_dirichlet_interval(double a, double b, double t, double x, double y);

/// Brownian motion reflected at 0 and killed at 1 (Lebesgue density):
///   sum_{n>=1} 2 cos(k_n x) cos(k_n y) exp(-k_n^2 t/2),  k_n = (n - 1/2) pi.
/// Same small-time refusal as the Bessel series (at time t/2).
double images_neumann_dirichlet(double t, double x, double y, double floor = kDefaultSeriesFloor);

}  // namespace kernels
}  // namespace besselheat
