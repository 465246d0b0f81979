#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <string_view>

#include "smap/numerics.hpp"

namespace smap {

enum class ConstraintKind { fixed, sccv, noise_scaled, zero, custom };

/// Produces a constraint vector from (prior errors, noise window, threshold).
using ConstraintGenerator =
    std::function<Vector(std::span<const double>, std::span<const double>, double)>;

/// How the target posterior errors of an update are chosen.
struct ConstraintStrategy {
    ConstraintKind kind = ConstraintKind::sccv;
    double noise_scale = 1.0;      // c in cv = c * n(k)
    ConstraintGenerator generator;  // custom only

    static ConstraintStrategy fixed() { return {ConstraintKind::fixed, 1.0, {}}; }
    static ConstraintStrategy sccv() { return {ConstraintKind::sccv, 1.0, {}}; }
    static ConstraintStrategy zero() { return {ConstraintKind::zero, 1.0, {}}; }
    static ConstraintStrategy noise(double c = 1.0);
    static ConstraintStrategy custom(ConstraintGenerator g);

    bool needs_noise() const noexcept { return kind == ConstraintKind::noise_scaled; }
    std::string name() const;
};

/// Parses the CLI spelling: fixed | sccv | noise | zero.
ConstraintStrategy parse_strategy(std::string_view name, double noise_scale = 1.0);

/// Bound handling for strategies that can leave [-gamma_bar, gamma_bar].
enum class CvBound { enforce, relax };

inline constexpr std::size_t all_slots = std::numeric_limits<std::size_t>::max();

/// Builds nu(k). Slots at index >= active_slots are warm-up padding and get
/// 0, the only value a zero regressor row can reach.
///
/// fixed:  every slot gamma_bar
/// sccv:   [gamma_bar * sign(e0), e1, ..., eL]; trailing errors are clipped
///         to the threshold, which only bites on rounding-level overshoot
///         when they come from an earlier update
/// noise:  c * n(k); throws ConstraintInfeasible if a component leaves the
///         threshold, unless bound == CvBound::relax
/// zero:   all zeros
Vector make_cv(const ConstraintStrategy& strategy, std::span<const double> prior_errors,
               std::span<const double> noise_window, double gamma_bar,
               std::size_t active_slots = all_slots, CvBound bound = CvBound::enforce);

/// True iff every |cv_i| <= gamma_bar.
bool satisfies_bound(std::span<const double> cv, double gamma_bar);

}  // namespace smap
