#include "smap/sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <omp.h>

namespace smap::sim {

Rng substream(std::uint64_t seed, std::uint64_t run, std::uint64_t purpose) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(run), static_cast<std::uint32_t>(run >> 32),
                      static_cast<std::uint32_t>(purpose)};
    return Rng(seq);
}

void ScenarioConfig::validate() const {
    if (num_taps == 0) throw InvalidInput("num_taps must be at least 1");
    if (!(noise_variance > 0.0)) throw InvalidInput("noise variance must be positive");
    if (!(std::abs(ar_coefficient) < 1.0)) throw InvalidInput("|ar coefficient| must be < 1");
    if (!(gamma_bar > 0.0)) throw InvalidInput("gamma_bar must be positive");
    if (!(delta >= 0.0)) throw InvalidInput("delta must be non-negative");
    if (!std::isfinite(snr_db)) throw InvalidInput("snr must be finite");
    if (ap_step && !(*ap_step >= 0.0 && *ap_step <= 1.0)) {
        throw InvalidInput("AP step must lie in [0, 1]");
    }
}

Vector Signals::regressor(std::size_t k, std::size_t taps) const {
    Vector x(taps);
    for (std::size_t j = 0; j < taps; ++j) x[j] = input[history + k - j];
    return x;
}

Vector generate_system(std::size_t num_taps, Rng& rng) {
    if (num_taps == 0) throw InvalidInput("num_taps must be at least 1");
    std::normal_distribution<double> normal(0.0, 1.0);
    Vector w0(num_taps);
    for (double& v : w0) v = normal(rng);
    return w0;
}

double unit_output_power(std::span<const double> w0, double a) {
    // var(w0^T x) = sigma_x^2 * sum_ij w_i w_j a^|i-j|, sigma_x^2 = 1 / (1 - a^2)
    double quad = 0.0;
    for (std::size_t i = 0; i < w0.size(); ++i) {
        for (std::size_t j = 0; j < w0.size(); ++j) {
            const auto lag = static_cast<double>(i > j ? i - j : j - i);
            quad += w0[i] * w0[j] * std::pow(a, lag);
        }
    }
    return quad / (1.0 - a * a);
}

Signals generate_signals(const ScenarioConfig& config, std::span<const double> w0, Rng& rng) {
    config.validate();
    if (w0.size() != config.num_taps) throw InvalidInput("w0 length must equal num_taps");

    const std::size_t K = config.iterations;
    const double a = config.ar_coefficient;
    const double target_power = config.noise_variance * std::pow(10.0, config.snr_db / 10.0);
    const double unit_power = unit_output_power(w0, a);
    if (!(unit_power > 0.0)) throw InvalidInput("unknown system has zero output power");

    Signals s;
    s.history = config.num_taps - 1;
    s.driving_variance = target_power / unit_power;
    const double driving_sd = std::sqrt(s.driving_variance);
    const double stationary_sd = driving_sd / std::sqrt(1.0 - a * a);

    std::normal_distribution<double> normal(0.0, 1.0);
    s.input.resize(s.history + K);
    if (!s.input.empty()) {
        s.input[0] = stationary_sd * normal(rng);
        for (std::size_t i = 1; i < s.input.size(); ++i) {
            s.input[i] = a * s.input[i - 1] + driving_sd * normal(rng);
        }
    }

    const double noise_sd = std::sqrt(config.noise_variance);
    s.noise.resize(K);
    for (double& v : s.noise) v = noise_sd * normal(rng);

    s.reference.resize(K);
    for (std::size_t k = 0; k < K; ++k) {
        double y = 0.0;
        for (std::size_t j = 0; j < w0.size(); ++j) y += w0[j] * s.input[s.history + k - j];
        s.reference[k] = y + s.noise[k];
    }
    return s;
}

namespace {

double misalignment(std::span<const double> w0, const FilterState& state) {
    double s = 0.0;
    for (std::size_t i = 0; i < w0.size(); ++i) {
        const double d = w0[i] - state.w[i];
        s += d * d;
    }
    return s;
}

}  // namespace

RunTrace run_on_signals(const ScenarioConfig& config, Algorithm algorithm,
                        std::span<const double> w0, const Signals& signals) {
    config.validate();
    if (algorithm == Algorithm::ap && !config.ap_step) {
        throw InvalidInput("AP run needs a step size");
    }
    const std::size_t K = config.iterations;
    if (signals.length() < K) throw InvalidInput("signals shorter than iteration count");

    RunTrace trace;
    trace.w0.assign(w0.begin(), w0.end());
    trace.misalignment.reserve(K + 1);
    trace.prior_error.reserve(K);
    trace.squared_error.reserve(K);
    trace.update_flags.reserve(K);
    trace.monitor_records.reserve(K);
    if (algorithm == Algorithm::smap) trace.local_records.reserve(K);

    const bool relax = config.relax_noise_bound && config.cv_strategy.needs_noise();
    const CvBound cv_bound = relax ? CvBound::relax : CvBound::enforce;
    const BoundPolicy update_bound = relax ? BoundPolicy::relaxed : BoundPolicy::enforce;

    FilterState state = FilterState::zeros(config.num_taps);
    SlidingWindow window(config.num_taps, config.reuse);
    trace.misalignment.push_back(misalignment(w0, state));

    for (std::size_t k = 0; k < K; ++k) {
        try {
            window.push(signals.regressor(k, config.num_taps), signals.reference[k],
                        signals.noise[k]);
            const DataWindow& view = window.view();

            if (algorithm == Algorithm::ap) {
                const double e0 = error_vector(state, view)[0];
                trace.prior_error.push_back(e0);
                trace.squared_error.push_back(e0 * e0);
                state = ap_update(state, view, *config.ap_step, config.delta);
                trace.monitor_records.push_back(
                    divergence_monitor(state, view, w0, config.gamma_bar, k));
                trace.update_flags.push_back(1);
                ++trace.updates;
            } else {
                const Vector e = error_vector(state, view);
                const Vector cv = make_cv(config.cv_strategy, e, view.n, config.gamma_bar,
                                          view.active, cv_bound);
                UpdateResult step =
                    smap_update(state, view, cv, config.gamma_bar, config.delta, update_bound);
                auto& out = step.outcome;

                trace.prior_error.push_back(out.prior_errors[0]);
                trace.squared_error.push_back(out.prior_errors[0] * out.prior_errors[0]);
                trace.update_flags.push_back(out.updated ? 1 : 0);
                if (out.updated) {
                    ++trace.updates;
                    if (!satisfies_bound(cv, config.gamma_bar)) ++trace.relaxed_updates;
                }

                LocalRobustnessRecord rec = local_check(w0, state, step.state, view, cv,
                                                        out.updated, config.delta, k);
                if (rec.classification == Classification::expand) ++trace.violations;
                trace.local_records.push_back(rec);
                trace.monitor_records.push_back(
                    divergence_monitor(step.state, view, w0, config.gamma_bar, k));
                state = std::move(step.state);
            }

            if (!all_finite(state.w)) throw Error("coefficients became non-finite");
            trace.misalignment.push_back(misalignment(w0, state));
            if (trace.misalignment[k + 1] > trace.misalignment[k]) ++trace.misalignment_increases;
        } catch (const IterationFailure&) {
            throw;
        } catch (const Error& err) {
            throw IterationFailure(k, err.what());
        }
    }

    trace.update_rate = K == 0 ? 0.0 : static_cast<double>(trace.updates) / static_cast<double>(K);
    trace.final_state = state;
    if (algorithm == Algorithm::smap) {
        trace.global_report =
            global_accumulate(trace.local_records, trace.misalignment.front(), trace.misalignment.back());
    }
    return trace;
}

RunTrace run_single(const ScenarioConfig& config, Algorithm algorithm, Rng& rng) {
    config.validate();
    const Vector w0 = generate_system(config.num_taps, rng);
    const Signals signals = generate_signals(config, w0, rng);
    return run_on_signals(config, algorithm, w0, signals);
}

double steady_state_db(std::span<const double> mse_curve) {
    if (mse_curve.empty()) return std::numeric_limits<double>::quiet_NaN();
    const std::size_t window = std::max<std::size_t>(1, mse_curve.size() / 5);
    double sum = 0.0;
    for (std::size_t k = mse_curve.size() - window; k < mse_curve.size(); ++k) sum += mse_curve[k];
    return 10.0 * std::log10(sum / static_cast<double>(window));
}

namespace {

struct RunResult {
    Vector squared_error;
    double update_rate = 0.0;
    double violations = 0.0;
    double increase_fraction = 0.0;
};

RunResult one_run(const ScenarioConfig& config, Algorithm algorithm, std::size_t r) {
    Rng rng = substream(config.seed, r);
    RunTrace t = run_single(config, algorithm, rng);
    const double K = static_cast<double>(config.iterations);
    return {std::move(t.squared_error), t.update_rate, static_cast<double>(t.violations),
            K == 0 ? 0.0 : static_cast<double>(t.misalignment_increases) / K};
}

// Sequential fold in run-index order; both drivers share it so that their
// floating-point sums are identical.
struct Accumulator {
    Vector mse;
    double update_rate = 0.0;
    double violations = 0.0;
    double increases = 0.0;

    void add(const RunResult& r) {
        for (std::size_t k = 0; k < mse.size(); ++k) mse[k] += r.squared_error[k];
        update_rate += r.update_rate;
        violations += r.violations;
        increases += r.increase_fraction;
    }

    MonteCarloSummary finish(std::size_t runs) {
        const double n = static_cast<double>(runs);
        MonteCarloSummary s;
        s.runs = runs;
        for (double& v : mse) v /= n;
        s.mse_curve = std::move(mse);
        s.mean_update_rate = update_rate / n;
        s.mean_violation_count = violations / n;
        s.mean_increase_fraction = increases / n;
        s.steady_state_mse_db = steady_state_db(s.mse_curve);
        return s;
    }
};

void check_mc(const ScenarioConfig& config, std::size_t runs) {
    config.validate();
    if (runs == 0) throw InvalidInput("Monte-Carlo needs at least one run");
}

constexpr std::size_t kBlock = 64;

}  // namespace

MonteCarloSummary run_monte_carlo_serial(const ScenarioConfig& config, Algorithm algorithm,
                                         std::size_t runs) {
    check_mc(config, runs);
    Accumulator acc{Vector(config.iterations, 0.0)};
    for (std::size_t r = 0; r < runs; ++r) acc.add(one_run(config, algorithm, r));
    return acc.finish(runs);
}

MonteCarloSummary run_monte_carlo(const ScenarioConfig& config, Algorithm algorithm,
                                  std::size_t runs) {
    check_mc(config, runs);
    Accumulator acc{Vector(config.iterations, 0.0)};
    std::vector<RunResult> block(kBlock);

    for (std::size_t base = 0; base < runs; base += kBlock) {
        const auto count = static_cast<std::ptrdiff_t>(std::min(kBlock, runs - base));
        std::string failure;
#pragma omp parallel for schedule(dynamic)
        for (std::ptrdiff_t i = 0; i < count; ++i) {
            try {
                block[i] = one_run(config, algorithm, base + static_cast<std::size_t>(i));
            } catch (const std::exception& e) {
#pragma omp critical
                if (failure.empty()) failure = "run " + std::to_string(base + i) + ": " + e.what();
            }
        }
        if (!failure.empty()) throw Error(failure);
        for (std::ptrdiff_t i = 0; i < count; ++i) acc.add(block[i]);
    }
    return acc.finish(runs);
}

}  // namespace smap::sim
