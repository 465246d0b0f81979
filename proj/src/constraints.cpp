#include "smap/constraints.hpp"

#include <algorithm>
#include <cmath>

#include "smap/errors.hpp"

namespace smap {

ConstraintStrategy ConstraintStrategy::noise(double c) {
    if (!(c >= 0.0)) throw InvalidInput("noise scale must be non-negative");
    return {ConstraintKind::noise_scaled, c, {}};
}

ConstraintStrategy ConstraintStrategy::custom(ConstraintGenerator g) {
    if (!g) throw InvalidInput("custom strategy needs a generator");
    return {ConstraintKind::custom, 1.0, std::move(g)};
}

std::string ConstraintStrategy::name() const {
    switch (kind) {
        case ConstraintKind::fixed: return "fixed";
        case ConstraintKind::sccv: return "sccv";
        case ConstraintKind::noise_scaled: return "noise";
        case ConstraintKind::zero: return "zero";
        case ConstraintKind::custom: return "custom";
    }
    return "unknown";
}

ConstraintStrategy parse_strategy(std::string_view name, double noise_scale) {
    if (name == "fixed") return ConstraintStrategy::fixed();
    if (name == "sccv") return ConstraintStrategy::sccv();
    if (name == "noise") return ConstraintStrategy::noise(noise_scale);
    if (name == "zero") return ConstraintStrategy::zero();
    throw InvalidInput("unknown constraint strategy '" + std::string(name) + "'");
}

Vector make_cv(const ConstraintStrategy& strategy, std::span<const double> prior_errors,
               std::span<const double> noise_window, double gamma_bar, std::size_t active_slots,
               CvBound bound) {
    if (!(gamma_bar > 0.0)) throw InvalidInput("threshold must be positive");
    const std::size_t slots = prior_errors.size();
    if (slots == 0) throw InvalidInput("empty error vector");

    Vector cv(slots, 0.0);
    switch (strategy.kind) {
        case ConstraintKind::fixed:
            std::fill(cv.begin(), cv.end(), gamma_bar);
            break;
        case ConstraintKind::sccv:
            cv[0] = prior_errors[0] < 0.0 ? -gamma_bar : gamma_bar;
            for (std::size_t j = 1; j < slots; ++j) {
                cv[j] = std::clamp(prior_errors[j], -gamma_bar, gamma_bar);
            }
            break;
        case ConstraintKind::noise_scaled:
            if (noise_window.size() != slots) {
                throw InvalidInput("noise-scaled strategy needs a noise window of length L+1");
            }
            for (std::size_t j = 0; j < slots; ++j) cv[j] = strategy.noise_scale * noise_window[j];
            break;
        case ConstraintKind::zero:
            break;
        case ConstraintKind::custom:
            cv = strategy.generator(prior_errors, noise_window, gamma_bar);
            if (cv.size() != slots) throw InvalidInput("custom strategy returned wrong length");
            break;
    }

    for (std::size_t j = std::min(active_slots, slots); j < slots; ++j) cv[j] = 0.0;

    if (strategy.kind == ConstraintKind::noise_scaled && bound == CvBound::enforce &&
        !satisfies_bound(cv, gamma_bar)) {
        throw ConstraintInfeasible("noise-scaled constraint exceeds threshold");
    }
    return cv;
}

bool satisfies_bound(std::span<const double> cv, double gamma_bar) {
    return std::all_of(cv.begin(), cv.end(), [&](double v) { return std::abs(v) <= gamma_bar; });
}

}  // namespace smap
