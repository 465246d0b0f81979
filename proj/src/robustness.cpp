#include "smap/robustness.hpp"

#include <algorithm>
#include <cmath>

#include "smap/errors.hpp"

namespace smap {

namespace {

Vector difference(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw InvalidInput("length mismatch between w0 and filter");
    Vector out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] - b[i];
    return out;
}

}  // namespace

LocalRobustnessRecord local_check(std::span<const double> w0, const FilterState& before,
                                  const FilterState& after, const DataWindow& window,
                                  std::span<const double> cv, bool updated, double delta,
                                  std::size_t k) {
    if (!window.noise_known) throw InvalidInput("local_check needs the noise window");
    if (cv.size() != window.slots()) throw InvalidInput("constraint vector length mismatch");

    const Vector wt_before = difference(w0, before.w);
    const Vector wt_after = difference(w0, after.w);

    LocalRobustnessRecord rec;
    rec.k = k;
    rec.updated = updated;
    rec.g1 = squared_norm(wt_after);
    rec.g2 = squared_norm(wt_before);

    if (updated) {
        const SpdFactor factor(gram(window.x), delta);
        const Vector noiseless = multiply_transposed(window.x, wt_before);
        rec.noiseless_energy = factor.quad_form(noiseless, noiseless);
        rec.noise_energy = factor.quad_form(window.n, window.n);
        rec.lhs = factor.quad_form(cv, cv);
        rec.rhs = 2.0 * factor.quad_form(cv, window.n);
        rec.g1 += rec.noiseless_energy;
        rec.g2 += rec.noise_energy;
        rec.classification = classify(rec.lhs, rec.rhs);
        rec.identity_residual = std::abs(rec.g1 - (rec.g2 - rec.rhs + rec.lhs));
    } else {
        rec.classification = Classification::no_update;
        rec.identity_residual = std::abs(rec.g1 - rec.g2);
    }

    if (rec.g2 == 0.0) throw DegenerateDenominator("g2 is zero at iteration " + std::to_string(k));
    return rec;
}

double energy_identity_residual(std::span<const double> w0, const FilterState& before,
                                const FilterState& after, const DataWindow& window,
                                std::span<const double> cv, bool updated, double delta) {
    if (!updated) throw InvalidInput("energy identity only applies to updating steps");
    return local_check(w0, before, after, window, cv, true, delta).identity_residual;
}

GlobalRobustnessReport global_accumulate(std::span<const LocalRobustnessRecord> records,
                                         double w_tilde_0_sq, double w_tilde_K_sq) {
    GlobalRobustnessReport report;
    report.iterations = records.size();
    report.numerator = w_tilde_K_sq;
    report.denominator = w_tilde_0_sq;
    for (const auto& rec : records) {
        if (!rec.updated) continue;
        ++report.update_set_size;
        report.numerator += rec.noiseless_energy;
        report.denominator += rec.noise_energy;
        report.energy_gap += rec.lhs - rec.rhs;
        if (rec.classification == Classification::expand) ++report.condition_violations;
    }
    if (report.denominator == 0.0) throw DegenerateDenominator("global ratio denominator is zero");
    report.ratio = report.numerator / report.denominator;
    return report;
}

DivergenceMonitorRecord divergence_monitor(const FilterState& after, const DataWindow& window,
                                           std::span<const double> w0, double gamma_bar,
                                           std::size_t k) {
    const Vector posterior = error_vector(after, window);
    DivergenceMonitorRecord rec;
    rec.k = k;
    rec.max_abs_posterior = max_abs(posterior);
    rec.bound = gamma_bar;
    rec.w_tilde_sq = squared_norm(difference(w0, after.w));
    return rec;
}

}  // namespace smap
