#include "smap/filters.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "smap/constraints.hpp"
#include "smap/errors.hpp"

namespace smap {

namespace {

void check_window(const FilterState& state, const DataWindow& window) {
    if (window.slots() == 0) throw InvalidInput("window has no slots");
    if (window.taps() != state.taps()) {
        throw InvalidInput("window has " + std::to_string(window.taps()) +
                           " taps, filter has " + std::to_string(state.taps()));
    }
    if (window.d.size() != window.slots()) throw InvalidInput("reference length mismatch");
    if (window.noise_known && window.n.size() != window.slots()) {
        throw InvalidInput("noise length mismatch");
    }
}

// Direction X (G + delta I)^{-1} r in coefficient space.
Vector projected_step(const SpdFactor& factor, const DataWindow& window,
                      std::span<const double> r) {
    return multiply(window.x, factor.solve(r));
}

}  // namespace

DataWindow DataWindow::from(Matrix x, Vector d) {
    DataWindow w;
    w.active = x.cols();
    w.x = std::move(x);
    w.d = std::move(d);
    w.n.assign(w.d.size(), 0.0);
    w.noise_known = false;
    if (w.d.size() != w.x.cols()) throw InvalidInput("reference length mismatch");
    return w;
}

DataWindow DataWindow::from(Matrix x, Vector d, Vector n) {
    DataWindow w = from(std::move(x), std::move(d));
    if (n.size() != w.slots()) throw InvalidInput("noise length mismatch");
    w.n = std::move(n);
    w.noise_known = true;
    return w;
}

SlidingWindow::SlidingWindow(std::size_t taps, std::size_t reuse) {
    if (taps == 0) throw InvalidInput("window needs at least one tap");
    window_.x = Matrix(taps, reuse + 1);
    window_.d.assign(reuse + 1, 0.0);
    window_.n.assign(reuse + 1, 0.0);
    window_.noise_known = true;
    window_.active = 0;
}

void SlidingWindow::push(std::span<const double> regressor, double reference, double noise) {
    auto& w = window_;
    if (regressor.size() != w.taps()) throw InvalidInput("regressor length mismatch");
    for (std::size_t j = w.slots() - 1; j > 0; --j) {
        for (std::size_t r = 0; r < w.taps(); ++r) w.x(r, j) = w.x(r, j - 1);
        w.d[j] = w.d[j - 1];
        w.n[j] = w.n[j - 1];
    }
    w.x.set_column(0, regressor);
    w.d[0] = reference;
    w.n[0] = noise;
    if (w.active < w.slots()) ++w.active;
}

void SlidingWindow::push(std::span<const double> regressor, double reference) {
    push(regressor, reference, 0.0);
    window_.noise_known = false;
}

std::string_view to_string(Classification c) {
    switch (c) {
        case Classification::contract: return "contract";
        case Classification::preserve: return "preserve";
        case Classification::expand: return "expand";
        case Classification::no_update: return "no-update";
    }
    return "unknown";
}

Vector error_vector(const FilterState& state, const DataWindow& window) {
    check_window(state, window);
    Vector e = multiply_transposed(window.x, state.w);
    for (std::size_t j = 0; j < e.size(); ++j) e[j] = window.d[j] - e[j];
    return e;
}

Classification classify(double lhs, double rhs) {
    const double gap = lhs - rhs;
    if (std::abs(gap) <= 1e-12 * std::max(1.0, std::abs(rhs))) return Classification::preserve;
    return gap < 0.0 ? Classification::contract : Classification::expand;
}

bool indicator(double e0, double gamma_bar) { return std::abs(e0) > gamma_bar; }

UpdateResult smap_update(const FilterState& state, const DataWindow& window,
                         std::span<const double> cv, double gamma_bar, double delta,
                         BoundPolicy policy) {
    check_window(state, window);
    if (cv.size() != window.slots()) throw InvalidInput("constraint vector length mismatch");
    if (!(gamma_bar >= 0.0)) throw InvalidInput("threshold must be non-negative");
    if (policy == BoundPolicy::enforce && !satisfies_bound(cv, gamma_bar)) {
        throw InvalidConstraint("constraint vector component exceeds threshold " +
                                std::to_string(gamma_bar));
    }

    UpdateResult result{state, {}};
    auto& out = result.outcome;
    out.prior_errors = error_vector(state, window);
    out.updated = indicator(out.prior_errors[0], gamma_bar);
    if (!out.updated) {
        out.posterior_errors = out.prior_errors;
        out.classification = Classification::no_update;
        return result;
    }

    Vector residual(cv.size());
    for (std::size_t j = 0; j < cv.size(); ++j) residual[j] = out.prior_errors[j] - cv[j];
    const SpdFactor factor(gram(window.x), delta);
    const Vector step = projected_step(factor, window, residual);
    for (std::size_t i = 0; i < step.size(); ++i) {
#ifdef SMAP_FAULT_INJECTION
        result.state.w[i] -= step[i];  // mutation used to prove `verify` detects a bad update
#else
        result.state.w[i] += step[i];
#endif
    }
    out.posterior_errors = error_vector(result.state, window);
    if (window.noise_known) {
        out.classification = classify(factor.quad_form(cv, cv), 2.0 * factor.quad_form(cv, window.n));
    } else {
        out.classification.reset();
    }
    return result;
}

FilterState ap_update(const FilterState& state, const DataWindow& window, double mu,
                      double delta) {
    check_window(state, window);
    if (!(mu >= 0.0 && mu <= 1.0)) throw InvalidInput("step size must lie in [0, 1]");
    if (mu == 0.0) return state;
    const Vector e = error_vector(state, window);
    const Vector step = projected_step(SpdFactor(gram(window.x), delta), window, e);
    FilterState next = state;
    for (std::size_t i = 0; i < step.size(); ++i) next.w[i] += mu * step[i];
    return next;
}

}  // namespace smap
