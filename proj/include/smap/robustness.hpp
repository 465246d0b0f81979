#pragma once

#include <cstddef>
#include <span>

#include "smap/filters.hpp"
#include "smap/numerics.hpp"

namespace smap {

/// Local energy balance of one iteration, observed from outside the filter.
///
/// With w~ = w0 - w, e~ = X^T w~(k) and A = (X^T X + delta I)^{-1}:
///   updating step:  g1 = |w~(k+1)|^2 + e~^T A e~,  g2 = |w~(k)|^2 + n^T A n
///   otherwise:      g1 = |w~(k+1)|^2,              g2 = |w~(k)|^2
/// For an updating step g1 - g2 = lhs - rhs, with lhs = cv^T A cv and
/// rhs = 2 cv^T A n; identity_residual measures how far that holds.
struct LocalRobustnessRecord {
    std::size_t k = 0;
    bool updated = false;
    double g1 = 0.0;
    double g2 = 0.0;
    double lhs = 0.0;
    double rhs = 0.0;
    double noiseless_energy = 0.0;  // e~^T A e~
    double noise_energy = 0.0;      // n^T A n
    Classification classification = Classification::no_update;
    double identity_residual = 0.0;
};

/// Accumulated robustness ratio over iterations 0..K-1. The ratio is
/// certified to stay <= eta_bound whenever no updating step expands.
struct GlobalRobustnessReport {
    std::size_t iterations = 0;
    std::size_t update_set_size = 0;
    double numerator = 0.0;
    double denominator = 0.0;
    double ratio = 0.0;
    double eta_bound = 1.0;
    std::size_t condition_violations = 0;
    // Sum of (lhs - rhs) over updating steps; telescopes to numerator - denominator.
    double energy_gap = 0.0;
};

/// Posterior-error bound after an update; the non-divergence argument.
struct DivergenceMonitorRecord {
    std::size_t k = 0;
    double max_abs_posterior = 0.0;
    double bound = 0.0;
    double w_tilde_sq = 0.0;
};

/// Requires the window's noise samples. Throws DegenerateDenominator if g2 == 0.
LocalRobustnessRecord local_check(std::span<const double> w0, const FilterState& before,
                                  const FilterState& after, const DataWindow& window,
                                  std::span<const double> cv, bool updated, double delta,
                                  std::size_t k = 0);

/// |g1 - (g2 - rhs + lhs)| for an updating step. Throws InvalidInput when
/// called with updated == false.
double energy_identity_residual(std::span<const double> w0, const FilterState& before,
                                const FilterState& after, const DataWindow& window,
                                std::span<const double> cv, bool updated, double delta);

/// Sums the updating records into the global ratio. Throws
/// DegenerateDenominator if the denominator is zero.
GlobalRobustnessReport global_accumulate(std::span<const LocalRobustnessRecord> records,
                                         double w_tilde_0_sq, double w_tilde_K_sq);

DivergenceMonitorRecord divergence_monitor(const FilterState& after, const DataWindow& window,
                                           std::span<const double> w0, double gamma_bar,
                                           std::size_t k = 0);

}  // namespace smap
