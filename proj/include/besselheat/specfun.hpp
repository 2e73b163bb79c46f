#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace besselheat {

/// Bessel index. Most operations require nu > -1; the killed-process
/// kernels accept any real index and say so in their own documentation.
struct Order {
    double nu = 0.0;
};

/// Throws DomainError unless nu > -1 (and finite).
void require_bessel_order(Order order, const char* where);

/// One spectral term of the Fourier-Bessel expansion.
struct EigenMode {
    int n = 0;            ///< mode number, 1-based
    double lambda = 0.0;  ///< n-th positive zero of J_nu
    double weight = 0.0;  ///< 2 / J_{nu+1}(lambda)^2
};

namespace specfun {

/// J_nu(z) for z >= 0, nu > -1.
///
/// Power series (extended precision) for small arguments, Hankel
/// amplitude-phase expansion for large ones, and forward recurrence in
/// the order when nu > 4 and nu < z.  Throws PoleError for z = 0, nu < 0.
double bessel_j(Order order, double z);

/// z^{-nu} J_nu(z); an entire function of z^2, equal to
/// 1 / (2^nu Gamma(nu+1)) at z = 0.
double bessel_j_normalized(Order order, double z);

/// e^{-z} I_nu(z) for z >= 0, nu > -1.  Throws PoleError for z = 0, nu < 0.
double bessel_i_scaled(Order order, double z);

/// log(e^{-z} I_nu(z)) for z > 0; never underflows.
double log_bessel_i_scaled(Order order, double z);

/// lambda_{n,nu}, the n-th positive zero of J_nu (n >= 1, nu > -1).
double bessel_j_zero(Order order, int n);

/// (n, lambda_{n,nu}, 2/J_{nu+1}(lambda)^2).
EigenMode eigen_mode(Order order, int n);

/// Builds the mode for an already known zero `lambda` of J_nu.
EigenMode make_eigen_mode(Order order, int n, double lambda);

/// The argument beyond which bessel_j switches from the power series to
/// the large-argument expansion (for nu <= 4).
double series_limit();

/// Power-series and large-argument branches evaluated directly; exposed so
/// the overlap band between them can be tested.
double bessel_j_series_branch(Order order, double z);
double bessel_j_asymptotic_branch(Order order, double z);

/// Enumerates the positive zeros of J_nu in increasing order.
///
/// Each zero is bracketed by a sign change of z^{-nu} J_nu(z) on a 0.5
/// step grid started 2.5 past the previous zero (consecutive zeros are
/// more than 3 apart for every nu > -1), then polished by Newton steps
/// kept inside the bracket.
class BesselZeroSequence {
public:
    explicit BesselZeroSequence(Order order);
    /// Resume after `found` zeros, the last of which is `last_zero`.
    BesselZeroSequence(Order order, int found, double last_zero);

    double next();
    int count() const { return found_; }

private:
    Order order_;
    int found_ = 0;
    double last_ = 0.0;
};

/// Read-only table of the first `count` eigenmodes of one order.
class ModeTable {
public:
    ModeTable(Order order, int count);

    Order order() const { return order_; }
    std::size_t size() const { return modes_.size(); }
    const EigenMode& operator[](std::size_t i) const { return modes_[i]; }
    std::span<const EigenMode> modes() const { return modes_; }

private:
    Order order_;
    std::vector<EigenMode> modes_;
};

}  // namespace specfun
}  // namespace besselheat
