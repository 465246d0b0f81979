#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>

#include <omp.h>

#include "smap/constraints.hpp"
#include "smap/errors.hpp"
#include "smap/filters.hpp"
#include "smap/oracle.hpp"
#include "smap/robustness.hpp"
#include "smap/sim.hpp"

namespace smap::cli {

namespace fs = std::filesystem;

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

void write_atomic(const fs::path& path, std::string_view content) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
        f.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!f) throw std::runtime_error("write failed: " + tmp.string());
    }
    fs::rename(tmp, path);
}

namespace {

struct ScenarioFlags {
    std::size_t taps = 10;
    std::size_t reuse = 2;
    double gamma_bar = 0.2236;
    double delta = 1e-12;
    double noise_var = 0.01;
    double ar = 0.95;
    double snr_db = 20.0;
    std::size_t iters = 1000;
    std::uint64_t seed = 1;
    std::string cv = "sccv";
    double noise_scale = 1.0;
    std::optional<double> mu;
    std::string out_dir = ".";
};

sim::ScenarioConfig to_config(const ScenarioFlags& f) {
    sim::ScenarioConfig c;
    c.num_taps = f.taps;
    c.reuse = f.reuse;
    c.gamma_bar = f.gamma_bar;
    c.delta = f.delta;
    c.noise_variance = f.noise_var;
    c.ar_coefficient = f.ar;
    c.snr_db = f.snr_db;
    c.iterations = f.iters;
    c.seed = f.seed;
    c.cv_strategy = parse_strategy(f.cv, f.noise_scale);
    c.ap_step = f.mu;
    c.validate();
    return c;
}

// A Monte-Carlo column such as "smap:sccv" or "ap:0.05".
struct AlgoSpec {
    std::string label;
    sim::Algorithm algorithm = sim::Algorithm::smap;
    std::string cv;
    double mu = 0.0;
};

AlgoSpec parse_algo(const std::string& token) {
    const auto colon = token.find(':');
    if (colon == std::string::npos) throw InvalidInput("algorithm spec '" + token + "' lacks ':'");
    const std::string kind = token.substr(0, colon);
    const std::string arg = token.substr(colon + 1);
    AlgoSpec spec;
    spec.label = token;
    if (kind == "smap") {
        parse_strategy(arg);
        spec.cv = arg;
    } else if (kind == "ap") {
        spec.algorithm = sim::Algorithm::ap;
        double mu = 0.0;
        const auto res = std::from_chars(arg.data(), arg.data() + arg.size(), mu);
        if (res.ec != std::errc{} || res.ptr != arg.data() + arg.size()) {
            throw InvalidInput("bad AP step '" + arg + "'");
        }
        spec.mu = mu;
    } else {
        throw InvalidInput("unknown algorithm '" + kind + "'");
    }
    return spec;
}

std::string trace_csv(const sim::RunTrace& t, sim::Algorithm algorithm) {
    std::ostringstream os;
    os << "k,e,updated,g1,g2,classification,lhs,rhs,misalignment,max_abs_posterior\n";
    for (std::size_t k = 0; k < t.prior_error.size(); ++k) {
        double g1 = t.misalignment[k + 1];
        double g2 = t.misalignment[k];
        double lhs = 0.0;
        double rhs = 0.0;
        std::string_view cls = "n/a";
        if (algorithm == sim::Algorithm::smap) {
            const auto& rec = t.local_records[k];
            g1 = rec.g1;
            g2 = rec.g2;
            lhs = rec.lhs;
            rhs = rec.rhs;
            cls = to_string(rec.classification);
        }
        os << k << ',' << format_number(t.prior_error[k]) << ',' << int(t.update_flags[k]) << ','
           << format_number(g1) << ',' << format_number(g2) << ',' << cls << ','
           << format_number(lhs) << ',' << format_number(rhs) << ','
           << format_number(t.misalignment[k + 1]) << ','
           << format_number(t.monitor_records[k].max_abs_posterior) << '\n';
    }
    return os.str();
}

int cmd_run(const ScenarioFlags& flags, const std::string& algo, std::ostream& out) {
    const sim::ScenarioConfig config = to_config(flags);
    sim::Algorithm algorithm = sim::Algorithm::smap;
    if (algo == "ap") {
        if (!config.ap_step) throw InvalidInput("--algo ap needs --mu");
        algorithm = sim::Algorithm::ap;
    }

    sim::Rng rng = sim::substream(config.seed, 0);
    const sim::RunTrace t = sim::run_single(config, algorithm, rng);

    const fs::path dir(flags.out_dir);
    write_atomic(dir / "trace.csv", trace_csv(t, algorithm));

    std::ostringstream s;
    s << "algorithm: " << (algorithm == sim::Algorithm::smap ? "smap" : "ap") << '\n';
    if (algorithm == sim::Algorithm::smap) s << "strategy: " << config.cv_strategy.name() << '\n';
    else s << "mu: " << format_number(*config.ap_step) << '\n';
    s << "seed: " << config.seed << '\n'
      << "iterations: " << config.iterations << '\n'
      << "updates: " << t.updates << '\n'
      << "update_rate: " << format_number(t.update_rate) << '\n'
      << "violations: " << t.violations << '\n'
      << "misalignment_increases: " << t.misalignment_increases << '\n'
      << "relaxed_updates: " << t.relaxed_updates << '\n'
      << "final_misalignment: " << format_number(t.misalignment.back()) << '\n';
    if (t.global_report) {
        s << "global_ratio: " << format_number(t.global_report->ratio) << '\n'
          << "eta_bound: " << format_number(t.global_report->eta_bound) << '\n';
    }
    write_atomic(dir / "summary.txt", s.str());
    out << s.str();
    return kOk;
}

int cmd_mc(const ScenarioFlags& flags, std::size_t runs, const std::vector<std::string>& algos,
           int threads, std::ostream& out) {
    if (runs == 0) throw InvalidInput("--runs must be at least 1");
    if (threads > 0) omp_set_num_threads(threads);
    const sim::ScenarioConfig base = to_config(flags);

    std::vector<AlgoSpec> specs;
    for (const auto& a : algos) specs.push_back(parse_algo(a));
    if (specs.empty()) throw InvalidInput("--algos is empty");

    std::vector<sim::MonteCarloSummary> summaries;
    for (const auto& spec : specs) {
        sim::ScenarioConfig c = base;
        if (spec.algorithm == sim::Algorithm::smap) {
            c.cv_strategy = parse_strategy(spec.cv, flags.noise_scale);
        } else {
            c.ap_step = spec.mu;
        }
        c.validate();
        summaries.push_back(sim::run_monte_carlo(c, spec.algorithm, runs));
    }

    std::ostringstream csv;
    csv << 'k';
    for (const auto& spec : specs) csv << ',' << spec.label;
    csv << '\n';
    for (std::size_t k = 0; k < base.iterations; ++k) {
        csv << k;
        for (const auto& s : summaries) csv << ',' << format_number(s.mse_curve[k]);
        csv << '\n';
    }

    std::ostringstream s;
    s << "runs: " << runs << '\n' << "iterations: " << base.iterations << '\n'
      << "seed: " << base.seed << '\n';
    for (std::size_t i = 0; i < specs.size(); ++i) {
        const auto& m = summaries[i];
        s << specs[i].label << ": update_rate=" << format_number(m.mean_update_rate)
          << " violations=" << format_number(m.mean_violation_count)
          << " increase_fraction=" << format_number(m.mean_increase_fraction)
          << " steady_state_mse_db=" << format_number(m.steady_state_mse_db) << '\n';
    }

    const fs::path dir(flags.out_dir);
    write_atomic(dir / "mse.csv", csv.str());
    write_atomic(dir / "summary.txt", s.str());
    out << s.str();
    return kOk;
}

struct VerifyStats {
    double update_gap = 0.0;
    double posterior_gap = 0.0;
    double identity_residual = 0.0;
    std::size_t worst = 0;
    double worst_score = -1.0;
};

constexpr double kVerifyTol = 1e-8;

int cmd_verify(std::size_t instances, std::size_t taps, std::size_t max_reuse,
               double gamma_bar, std::uint64_t seed, std::ostream& out, std::ostream& err) {
    if (taps == 0) throw InvalidInput("--taps must be at least 1");
    if (max_reuse + 1 > taps) throw InvalidInput("--reuse must leave L+1 <= taps");
    if (!(gamma_bar > 0.0)) throw InvalidInput("--gamma-bar must be positive");

    struct Instance {
        Matrix x;
        Vector d, n, w_prev, w0, cv;
    };
    const auto make_instance = [&](std::size_t i) {
        sim::Rng rng = sim::substream(seed, i, 7);
        std::normal_distribution<double> normal(0.0, 1.0);
        std::uniform_real_distribution<double> uniform(-gamma_bar, gamma_bar);
        const std::size_t slots = i % (max_reuse + 1) + 1;
        Instance inst;
        inst.x = Matrix(taps, slots);
        for (std::size_t r = 0; r < taps; ++r)
            for (std::size_t c = 0; c < slots; ++c) inst.x(r, c) = normal(rng);
        inst.w_prev.resize(taps);
        inst.w0.resize(taps);
        for (double& v : inst.w_prev) v = normal(rng);
        for (double& v : inst.w0) v = normal(rng);
        inst.cv.resize(slots);
        for (double& v : inst.cv) v = uniform(rng);
        // Prior errors with |e0| > gamma_bar so that the update fires.
        Vector e(slots);
        for (double& v : e) v = normal(rng);
        e[0] = (e[0] < 0 ? -1.0 : 1.0) * (gamma_bar + std::abs(normal(rng)) + 1e-3);
        inst.d = multiply_transposed(inst.x, inst.w_prev);
        for (std::size_t j = 0; j < slots; ++j) inst.d[j] += e[j];
        inst.n = multiply_transposed(inst.x, inst.w0);
        for (std::size_t j = 0; j < slots; ++j) inst.n[j] = inst.d[j] - inst.n[j];
        return inst;
    };

    VerifyStats stats;
    for (std::size_t i = 0; i < instances; ++i) {
        const Instance inst = make_instance(i);
        const DataWindow window = DataWindow::from(inst.x, inst.d, inst.n);
        const FilterState before{inst.w_prev};
        const UpdateResult up = smap_update(before, window, inst.cv, gamma_bar, 0.0);
        const Vector ref = oracle::solve_constrained({inst.x, inst.d, inst.w_prev, inst.cv});

        double update_gap = 0.0;
        for (std::size_t r = 0; r < taps; ++r)
            update_gap = std::max(update_gap, std::abs(up.state.w[r] - ref[r]));
        double posterior_gap = 0.0;
        for (std::size_t j = 0; j < inst.cv.size(); ++j)
            posterior_gap = std::max(posterior_gap,
                                     std::abs(up.outcome.posterior_errors[j] - inst.cv[j]));
        const LocalRobustnessRecord rec =
            local_check(inst.w0, before, up.state, window, inst.cv, up.outcome.updated, 0.0, i);
        const double identity = rec.identity_residual / std::max(1.0, rec.g2);
        const bool fired = up.outcome.updated;

        stats.update_gap = std::max(stats.update_gap, update_gap);
        stats.posterior_gap = std::max(stats.posterior_gap, posterior_gap);
        stats.identity_residual = std::max(stats.identity_residual, identity);
        const double score = fired ? std::max({update_gap, posterior_gap, identity})
                                   : std::numeric_limits<double>::infinity();
        if (score > stats.worst_score) {
            stats.worst_score = score;
            stats.worst = i;
        }
    }

    out << "instances: " << instances << '\n'
        << "max_update_disagreement: " << format_number(stats.update_gap) << '\n'
        << "max_posterior_deviation: " << format_number(stats.posterior_gap) << '\n'
        << "max_identity_residual: " << format_number(stats.identity_residual) << '\n';

    if (instances == 0 || stats.worst_score <= kVerifyTol) {
        out << "verify: ok\n";
        return kOk;
    }

    const Instance bad = make_instance(stats.worst);
    err << "verify: FAILED (tolerance " << format_number(kVerifyTol) << ")\n"
        << "worst instance " << stats.worst << " (seed " << seed << "), L = "
        << bad.cv.size() - 1 << ", score " << format_number(stats.worst_score) << '\n';
    const auto dump = [&](std::string_view name, const Vector& v) {
        err << name << ':';
        for (double x : v) err << ' ' << format_number(x);
        err << '\n';
    };
    for (std::size_t c = 0; c < bad.x.cols(); ++c) dump("x[" + std::to_string(c) + "]", bad.x.column(c));
    dump("d", bad.d);
    dump("w_prev", bad.w_prev);
    dump("cv", bad.cv);
    return kFailure;
}

}  // namespace

int run_cli(std::span<const std::string> args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Set-membership affine projection experiments", "smap"};
    app.require_subcommand(1);
    app.set_config("--config", "", "key=value file; command-line flags take precedence");

    ScenarioFlags f;
    app.add_option("--taps", f.taps, "Filter taps (N+1)")->capture_default_str();
    app.add_option("--reuse", f.reuse, "Data-reuse factor L")->capture_default_str();
    app.add_option("--gamma-bar", f.gamma_bar, "Error threshold")->capture_default_str();
    app.add_option("--delta", f.delta, "Gram regularization")->capture_default_str();
    app.add_option("--noise-var", f.noise_var, "Measurement noise variance")->capture_default_str();
    app.add_option("--ar", f.ar, "AR(1) input coefficient")->capture_default_str();
    app.add_option("--snr-db", f.snr_db, "Signal-to-noise ratio in dB")->capture_default_str();
    app.add_option("--iters", f.iters, "Iterations per run")->capture_default_str();
    app.add_option("--seed", f.seed, "Master RNG seed")->capture_default_str();
    app.add_option("--cv", f.cv, "Constraint vector")
        ->check(CLI::IsMember({"fixed", "sccv", "noise", "zero"}))
        ->capture_default_str();
    app.add_option("--noise-scale", f.noise_scale, "c in cv = c n(k)")->capture_default_str();
    app.add_option("--mu", f.mu, "AP step size");
    app.add_option("--out-dir", f.out_dir, "Output directory")->capture_default_str();

    std::string algo = "smap";
    auto* run = app.add_subcommand("run", "Single run; writes trace.csv and summary.txt");
    run->fallthrough();
    run->add_option("--algo", algo, "smap or ap")
        ->check(CLI::IsMember({"smap", "ap"}))
        ->capture_default_str();

    std::size_t runs = 1000;
    int threads = 0;
    std::vector<std::string> algos{"smap:sccv", "smap:noise", "smap:fixed", "ap:0.9", "ap:0.05"};
    auto* mc = app.add_subcommand("mc", "Monte-Carlo MSE curves; writes mse.csv and summary.txt");
    mc->fallthrough();
    mc->add_option("--runs", runs, "Independent runs")->capture_default_str();
    mc->add_option("--algos", algos, "Comma-separated smap:<cv> / ap:<mu> list")
        ->delimiter(',')
        ->capture_default_str();
    mc->add_option("--threads", threads, "OpenMP threads (0 = runtime default)");

    std::size_t instances = 1000;
    auto* verify = app.add_subcommand("verify", "Cross-check the update against the KKT oracle");
    verify->fallthrough();
    verify->add_option("--instances", instances, "Random instances")->capture_default_str();

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return kOk;
    } catch (const CLI::CallForAllHelp& e) {
        out << app.help("", CLI::AppFormatMode::All);
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << '\n' << app.help();
        return kUsage;
    }

    try {
        if (*run) return cmd_run(f, algo, out);
        if (*mc) return cmd_mc(f, runs, algos, threads, out);
        if (*verify) return cmd_verify(instances, f.taps, f.reuse, f.gamma_bar, f.seed, out, err);
    } catch (const sim::IterationFailure& e) {
        err << "numeric failure at " << e.what() << '\n';
        return kFailure;
    } catch (const InvalidInput& e) {
        err << "usage error: " << e.what() << '\n';
        return kUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kFailure;
    }
    return kUsage;
}

}  // namespace smap::cli
