#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>

#include "smap/numerics.hpp"

namespace smap {

/// Adaptive coefficient vector w(k). order() is N, the number of taps minus one.
struct FilterState {
    Vector w;

    static FilterState zeros(std::size_t taps) { return FilterState{Vector(taps, 0.0)}; }
    std::size_t taps() const noexcept { return w.size(); }
    std::size_t order() const noexcept { return w.empty() ? 0 : w.size() - 1; }

    bool operator==(const FilterState&) const = default;
};

/// The L+1 most recent regressors, references and (in simulation) noise samples.
/// Column j of x is x(k-j); d[j] = d(k-j); n[j] = n(k-j). Slots at index
/// >= active are warm-up padding: zero regressor, zero reference, zero noise.
struct DataWindow {
    Matrix x;
    Vector d;
    Vector n;
    bool noise_known = false;
    std::size_t active = 0;

    std::size_t reuse() const noexcept { return x.cols() == 0 ? 0 : x.cols() - 1; }
    std::size_t slots() const noexcept { return x.cols(); }
    std::size_t taps() const noexcept { return x.rows(); }

    /// Fully populated window built from explicit columns (tests, verification).
    static DataWindow from(Matrix x, Vector d);
    static DataWindow from(Matrix x, Vector d, Vector n);
};

/// Maintains a DataWindow as samples stream in. Starts zero-padded; the
/// newest sample always lands in slot 0.
class SlidingWindow {
public:
    SlidingWindow(std::size_t taps, std::size_t reuse);

    void push(std::span<const double> regressor, double reference, double noise);
    void push(std::span<const double> regressor, double reference);

    const DataWindow& view() const noexcept { return window_; }

private:
    DataWindow window_;
};

enum class Classification { contract, preserve, expand, no_update };

std::string_view to_string(Classification c);

/// Trichotomy of an updating step from lhs = cv^T A cv and rhs = 2 cv^T A n.
/// Equality is judged with relative tolerance 1e-12 * max(1, |rhs|).
Classification classify(double lhs, double rhs);

/// Per-iteration record of one set-membership update. The classification of
/// an updating step needs n(k), so it is empty when the window carries no
/// noise. g1 and g2 need w0 and are attached by the simulation harness.
struct UpdateOutcome {
    Vector prior_errors;
    bool updated = false;
    Vector posterior_errors;
    double g1 = 0.0;
    double g2 = 0.0;
    std::optional<Classification> classification = Classification::no_update;
};

struct UpdateResult {
    FilterState state;
    UpdateOutcome outcome;
};

/// Whether smap_update rejects constraint vectors with |cv_i| > gamma_bar.
/// `relaxed` exists for simulations that steer to the raw noise vector.
enum class BoundPolicy { enforce, relaxed };

/// e(k) = d(k) - X^T(k) w(k); component 0 is the a-priori error.
Vector error_vector(const FilterState& state, const DataWindow& window);

/// True iff |e0| > gamma_bar, strictly. The boundary itself does not update.
bool indicator(double e0, double gamma_bar);

/// One SM-AP step:
///   w + X (X^T X + delta I)^{-1} (e - cv)   if |e(k)| > gamma_bar
///   w                                      otherwise
UpdateResult smap_update(const FilterState& state, const DataWindow& window,
                         std::span<const double> cv, double gamma_bar, double delta,
                         BoundPolicy policy = BoundPolicy::enforce);

/// Conventional affine projection step w + mu X (X^T X + delta I)^{-1} e. Always updates.
FilterState ap_update(const FilterState& state, const DataWindow& window, double mu,
                      double delta);

}  // namespace smap
