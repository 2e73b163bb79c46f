#include "doctest.h"

#include <cmath>

#include "besselheat/errors.hpp"
#include "besselheat/kernels.hpp"

using namespace besselheat;
using namespace besselheat::kernels;

namespace {

constexpr double kPi = 3.14159265358979323846;

double sine_series(double t, double x, double y)
{
    double sum = 0.0;
    for (int n = 400; n >= 1; --n) {
        const double k = n * kPi;
        sum += 2.0 * std::sin(k * x) * std::sin(k * y) * std::exp(-k * k * t / 2.0);
    }
    return sum;
}

}  // namespace

TEST_CASE("Dirichlet images: reference value and boundary")
{
    CHECK(images_dirichlet(0.1, 0.5, 0.5) == doctest::Approx(1.24457).epsilon(1e-5));
    const double three = (1.0 - 2.0 * std::exp(-5.0)) / std::sqrt(2 * kPi * 0.1);
    CHECK(images_dirichlet(0.1, 0.5, 0.5) == doctest::Approx(three).epsilon(1e-8));
    CHECK(images_dirichlet(0.1, 0.0, 0.5) == 0.0);
    CHECK(images_dirichlet(0.1, 1e-9, 0.5) < 1e-7);
    CHECK_THROWS_AS(images_dirichlet(0.0, 0.5, 0.5), DomainError);
    CHECK_THROWS_AS(images_dirichlet(0.1, -0.5, 0.5), DomainError);
}

TEST_CASE("Dirichlet images match the sine series")
{
    for (double t : {0.02, 0.1, 0.5, 1.0}) {
        for (int i = 1; i <= 19; ++i) {
            for (int j = 1; j <= 19; ++j) {
                const double x = 0.05 * i;
                const double y = 0.05 * j;
                const double v = images_dirichlet(t, x, y);
                CHECK(v > 0.0);
                CHECK(v == images_dirichlet(t, y, x));
                CHECK(std::fabs(v - sine_series(t, x, y)) <= 1e-12 * std::max(1.0, v));
            }
        }
    }
}

TEST_CASE("interval rescaling")
{
    CHECK(images_dirichlet_interval(0.0, 1.0, 0.3, 0.2, 0.6) == images_dirichlet(0.3, 0.2, 0.6));
    CHECK(images_dirichlet_interval(0.0, 2.0, 0.3, 0.4, 1.2) ==
          doctest::Approx(0.5 * images_dirichlet(0.3 / 4, 0.2, 0.6)).epsilon(1e-15));
    const double v = images_dirichlet_interval(0.25, 1.0, 0.1, 0.5, 0.75 - 1e-9);
    CHECK(v > 0.0);
    CHECK(images_dirichlet_interval(0.25, 1.0, 0.1, 0.5, 0.7) == images_dirichlet_interval(0.25, 1.0, 0.1, 0.7, 0.5));
    CHECK_THROWS_AS(images_dirichlet_interval(0.25, 1.0, 0.1, 0.2, 0.5), DomainError);
    CHECK_THROWS_AS(images_dirichlet_interval(0.25, 1.0, 0.1, 0.5, 1.0), DomainError);
    CHECK_THROWS_AS(images_dirichlet_interval(1.0, 0.5, 0.1, 0.7, 0.8), DomainError);
}

TEST_CASE("Neumann-Dirichlet cosine expansion")
{
    CHECK(images_neumann_dirichlet(1.0, 0.3, 0.7) == images_neumann_dirichlet(1.0, 0.7, 0.3));
    CHECK(images_neumann_dirichlet(1.0, 0.3, 1.0) == 0.0);
    const double h = 1e-6;
    const double slope = (images_neumann_dirichlet(0.5, h, 0.4) - images_neumann_dirichlet(0.5, 0.0, 0.4)) / h;
    CHECK(std::fabs(slope) < 1e-4);
    // Lebesgue probability: integral over y of the density is below 1 and decreasing in t
    auto mass = [](double t) {
        double s = 0.0;
        const int n = 4000;
        for (int i = 0; i < n; ++i) {
            s += images_neumann_dirichlet(t, 0.3, (i + 0.5) / n) / n;
        }
        return s;
    };
    const double m1 = mass(0.2);
    const double m2 = mass(0.8);
    CHECK(m1 < 1.0);
    CHECK(m2 < m1);
    // survival of the reflected walk: sum over modes of 2 cos(kx) sin(k)/k e^{-k^2 t/2}
    double surv = 0.0;
    for (int n = 1; n < 200; ++n) {
        const double k = (n - 0.5) * kPi;
        surv += 2 * std::cos(k * 0.3) * std::sin(k) / k * std::exp(-k * k * 0.2 / 2);
    }
    CHECK(m1 == doctest::Approx(surv).epsilon(1e-6));
}
