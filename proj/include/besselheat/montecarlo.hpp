#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "besselheat/random.hpp"
#include "besselheat/specfun.hpp"

namespace besselheat {

enum class ZeroBoundary { reflect, kill, none };
enum class OneBoundary { kill, none };

struct PathEnsembleConfig {
    Order nu;
    double start_x = 0.5;
    double horizon_t = 1.0;
    double step_h = 1e-3;
    std::uint64_t paths = 1;
    ZeroBoundary boundary_at_zero = ZeroBoundary::reflect;
    OneBoundary boundary_at_one = OneBoundary::kill;
    std::uint64_t seed = 0;
    /// Also kill with the Brownian-bridge probability of an unseen crossing
    /// of 1 inside each step (removes the O(sqrt(h)) end-point bias to first order).
    bool bridge_correction = true;
    /// Worker threads; unset means resolve_threads().
    std::optional<unsigned> threads;
};

/// Throws ConfigError unless the configuration is admissible.
void validate(const PathEnsembleConfig& config);

/// Transition-density estimate w.r.t. the speed measure y^{2nu+1} dy on
/// equal-width bins of [0, 1].  Survivors beyond 1 (no killing at 1) are
/// counted in `overflow`.
struct HistogramDensity {
    Order nu;
    std::vector<double> bin_edges;
    std::vector<std::uint64_t> counts;
    std::vector<double> estimates;
    std::vector<double> std_errors;
    std::uint64_t survivors = 0;
    std::uint64_t killed = 0;
    std::uint64_t overflow = 0;
    std::uint64_t paths_total = 0;

    std::size_t bins() const { return estimates.size(); }
    double bin_mass(std::size_t i) const;
    /// sum of estimate * mass over bins plus the overflow and killed fractions
    double total_mass() const;
    /// standard error of total_mass() treated as a sum of multinomial cells
    double total_mass_error() const;
};

/// One exact step of the squared Bessel process of dimension delta:
/// X_{t+h} | X_t = x  ~  h * noncentral chi-square(delta, x / h).
double sample_besq_step(double x, double delta, double h, Philox4x32& rng);

/// Simulates `config.paths` independent paths and bins their positions at
/// the horizon.  Bit-identical for a fixed config whatever the thread count.
HistogramDensity simulate_density(const PathEnsembleConfig& config, int bins);

struct BinComparison {
    std::size_t bin = 0;
    double estimate = 0.0;
    double expected = 0.0;
    double z = 0.0;
};

struct HistogramComparison {
    std::vector<BinComparison> bins;  ///< occupied bins only
    std::size_t occupied = 0;
    std::size_t within_3sigma = 0;

    double fraction_within() const { return occupied == 0 ? 0.0 : static_cast<double>(within_3sigma) / occupied; }
};

/// z = (estimate - bin average of the analytic density) / std_error over
/// occupied bins; the bin average is taken against y^{2nu+1} with 16
/// midpoint sub-nodes.  Throws DomainError for a histogram without paths.
HistogramComparison compare_histogram(const HistogramDensity& h, const std::function<double(double)>& analytic);

}  // namespace besselheat
