#include "besselheat/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "besselheat/errors.hpp"
#include "besselheat/kernels.hpp"
#include "besselheat/parallel.hpp"

namespace besselheat {
namespace {

constexpr double kTwoPi = 6.28318530717958647692;
constexpr std::uint32_t kKillStream = 0;
constexpr std::uint32_t kMoveStream = 1;
constexpr std::uint64_t kChunk = 1024;

struct NormalPair {
    double a;
    double b;
};

NormalPair normal_pair(Philox4x32& rng)
{
    const double r = std::sqrt(-2.0 * std::log(rng.uniform()));
    const double angle = kTwoPi * rng.uniform();
    return {r * std::cos(angle), r * std::sin(angle)};
}

double chi_square(double dof, Philox4x32& rng)
{
    if (dof <= 0.0) {
        return 0.0;
    }
    std::gamma_distribution<double> gamma(dof / 2.0, 2.0);
    return gamma(rng);
}

int step_count(const PathEnsembleConfig& c)
{
    const double ratio = c.horizon_t / c.step_h;
    const double rounded = std::round(ratio);
    if (std::fabs(ratio - rounded) <= 1e-9 * ratio) {
        return static_cast<int>(rounded);
    }
    return static_cast<int>(std::ceil(ratio));
}

struct Tally {
    std::vector<std::uint64_t> counts;
    std::uint64_t killed = 0;
    std::uint64_t overflow = 0;
};

}  // namespace

void validate(const PathEnsembleConfig& c)
{
    if (!std::isfinite(c.nu.nu)) {
        throw ConfigError("simulate_density: nu must be finite");
    }
    if (!(c.start_x > 0.0 && c.start_x < 1.0)) {
        throw ConfigError("simulate_density: start_x must lie in (0, 1)");
    }
    if (!(c.horizon_t > 0.0) || !std::isfinite(c.horizon_t)) {
        throw ConfigError("simulate_density: horizon_t must be positive");
    }
    if (!(c.step_h > 0.0) || c.step_h > c.horizon_t) {
        throw ConfigError("simulate_density: requires 0 < step_h <= horizon_t");
    }
    if (c.horizon_t / c.step_h > 1e8) {
        throw ConfigError("simulate_density: more than 1e8 steps per path");
    }
    if (c.paths < 1) {
        throw ConfigError("simulate_density: paths must be at least 1");
    }
    if (c.boundary_at_zero == ZeroBoundary::reflect && !(c.nu.nu > -1.0)) {
        throw ConfigError("simulate_density: reflection at 0 requires nu > -1");
    }
    if (c.threads && *c.threads == 0) {
        throw ConfigError("simulate_density: thread count must be positive");
    }
}

double HistogramDensity::bin_mass(std::size_t i) const
{
    const SpeedMeasure m{nu};
    return m.mass(bin_edges[i], bin_edges[i + 1]);
}

double HistogramDensity::total_mass() const
{
    double sum = 0.0;
    for (std::size_t i = 0; i < bins(); ++i) {
        sum += estimates[i] * bin_mass(i);
    }
    const double n = static_cast<double>(paths_total);
    return sum + static_cast<double>(killed + overflow) / n;
}

double HistogramDensity::total_mass_error() const
{
    const double n = static_cast<double>(paths_total);
    double var = 0.0;
    for (std::size_t i = 0; i < bins(); ++i) {
        const double s = std_errors[i] * bin_mass(i);
        var += s * s;
    }
    for (std::uint64_t c : {killed, overflow}) {
        const double p = static_cast<double>(c) / n;
        var += p * (1.0 - p) / n;
    }
    return std::sqrt(var);
}

double sample_besq_step(double x, double delta, double h, Philox4x32& rng)
{
    const double lam = std::max(x, 0.0) / h;
    double y = 0.0;
    if (delta == 2.0) {
        const NormalPair z = normal_pair(rng);
        const double shifted = z.a + std::sqrt(lam);
        y = shifted * shifted + z.b * z.b;
    } else if (delta > 1.0) {
        const double shifted = normal_pair(rng).a + std::sqrt(lam);
        y = shifted * shifted + chi_square(delta - 1.0, rng);
    } else {
        // Poisson mixture: chi-square with delta + 2N degrees of freedom
        std::uint64_t n = 0;
        if (lam > 0.0) {
            std::poisson_distribution<std::uint64_t> poisson(lam / 2.0);
            n = poisson(rng);
        }
        y = chi_square(delta + 2.0 * static_cast<double>(n), rng);
    }
    return h * y;
}

HistogramDensity simulate_density(const PathEnsembleConfig& config, int bins)
{
    validate(config);
    if (bins < 1) {
        throw ConfigError("simulate_density: bins must be positive");
    }
    const double nu = config.nu.nu;
    const double delta = 2.0 * (nu + 1.0);
    if (!(delta > 0.0)) {
        throw NumericalError("simulate_density: squared Bessel dimension 2(nu+1) = " + std::to_string(delta) +
                             " is not positive");
    }

    const int steps = step_count(config);
    const double last_step = config.horizon_t - (steps - 1) * config.step_h;
    const bool kill_one = config.boundary_at_one == OneBoundary::kill;
    // for nu >= 0 the origin is never reached, so killing there is void
    const bool kill_zero = config.boundary_at_zero == ZeroBoundary::kill && nu < 0.0;
    const Order mirrored{-nu};
    const double x0 = config.start_x * config.start_x;

    const std::uint64_t chunks = (config.paths + kChunk - 1) / kChunk;
    std::vector<Tally> tallies(chunks);

    parallel_for(chunks, resolve_threads(config.threads), [&](std::size_t chunk) {
        Tally tally;
        tally.counts.assign(static_cast<std::size_t>(bins), 0);
        const std::uint64_t begin = chunk * kChunk;
        const std::uint64_t end = std::min(config.paths, begin + kChunk);
        for (std::uint64_t path = begin; path < end; ++path) {
            Philox4x32 move(config.seed, kMoveStream, path);
            Philox4x32 kill(config.seed, kKillStream, path);
            double x = x0;
            bool alive = true;
            for (int s = 0; s < steps && alive; ++s) {
                const double h = s + 1 == steps ? last_step : config.step_h;
                const double next = sample_besq_step(x, delta, h, move);
                const double ra = std::sqrt(x);
                const double rb = std::sqrt(next);
                if (kill_one) {
                    if (rb >= 1.0) {
                        alive = false;
                    } else if (config.bridge_correction) {
                        const double crossing = std::exp(-2.0 * (1.0 - ra) * (1.0 - rb) / h);
                        alive = kill.uniform() >= crossing;
                    }
                }
                if (alive && kill_zero) {
                    // P(no visit to 0 | endpoints) = I_{-nu}(z) / I_nu(z)
                    const double z = ra * rb / h;
                    double survive = 0.0;
                    if (z > 0.0) {
                        survive = std::exp(specfun::log_bessel_i_scaled(mirrored, z) -
                                           specfun::log_bessel_i_scaled(config.nu, z));
                    }
                    alive = kill.uniform() < survive;
                }
                x = next;
            }
            if (!alive) {
                ++tally.killed;
                continue;
            }
            const double r = std::sqrt(x);
            if (r >= 1.0) {
                ++tally.overflow;
                continue;
            }
            const auto bin = std::min(static_cast<std::size_t>(r * bins), static_cast<std::size_t>(bins - 1));
            ++tally.counts[bin];
        }
        tallies[chunk] = std::move(tally);
    });

    HistogramDensity h;
    h.nu = config.nu;
    h.paths_total = config.paths;
    h.bin_edges.resize(static_cast<std::size_t>(bins) + 1);
    for (int i = 0; i <= bins; ++i) {
        h.bin_edges[i] = static_cast<double>(i) / bins;
    }
    h.counts.assign(static_cast<std::size_t>(bins), 0);
    for (const Tally& t : tallies) {
        for (int i = 0; i < bins; ++i) {
            h.counts[i] += t.counts[i];
        }
        h.killed += t.killed;
        h.overflow += t.overflow;
    }
    h.survivors = h.paths_total - h.killed;

    const double n = static_cast<double>(h.paths_total);
    h.estimates.resize(h.counts.size());
    h.std_errors.resize(h.counts.size());
    for (std::size_t i = 0; i < h.counts.size(); ++i) {
        const double p = static_cast<double>(h.counts[i]) / n;
        const double mass = h.bin_mass(i);
        h.estimates[i] = p / mass;
        h.std_errors[i] = std::sqrt(p * (1.0 - p) / n) / mass;
    }
    return h;
}

HistogramComparison compare_histogram(const HistogramDensity& h, const std::function<double(double)>& analytic)
{
    if (h.paths_total == 0 || h.bins() == 0) {
        throw DomainError("compare_histogram: histogram has no paths");
    }
    constexpr int kSubnodes = 16;
    const SpeedMeasure m{h.nu};
    HistogramComparison out;
    for (std::size_t i = 0; i < h.bins(); ++i) {
        if (h.counts[i] == 0) {
            continue;
        }
        const double a = h.bin_edges[i];
        const double w = (h.bin_edges[i + 1] - a) / kSubnodes;
        double num = 0.0;
        double den = 0.0;
        for (int j = 0; j < kSubnodes; ++j) {
            const double y = a + (j + 0.5) * w;
            const double weight = m.density(y);
            num += analytic(y) * weight;
            den += weight;
        }
        const double expected = num / den;
        BinComparison b{i, h.estimates[i], expected, 0.0};
        const double diff = b.estimate - expected;
        if (h.std_errors[i] > 0.0) {
            b.z = diff / h.std_errors[i];
        } else {
            b.z = diff == 0.0 ? 0.0 : std::copysign(INFINITY, diff);
        }
        ++out.occupied;
        if (std::fabs(b.z) <= 3.0) {
            ++out.within_3sigma;
        }
        out.bins.push_back(b);
    }
    return out;
}

}  // namespace besselheat
