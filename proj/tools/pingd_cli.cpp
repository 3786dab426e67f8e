// pingd: command-line harness for the perturbed INGD solver.
//
//   pingd run       --fn abs1d --eps 0.1 --delta 0.01 --replicas 100 --out results/
//   pingd certify   --fn euclid --dim 3 --point 0,0,0 --eps 0.1 --delta 0.05
//   pingd schedule  --eps 0.1 --delta 0.01 --lipschitz 1 --gap 1 --gamma 0.25
//   pingd corpus
//
// Exit codes: 0 success, 1 config error, 2 runtime error, 3 statistical
// contract violated.

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "pingd/harness.hpp"
#include "pingd/oracle.hpp"
#include "pingd/sampler.hpp"
#include "pingd/solver.hpp"
#include "pingd/verifier.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitRuntime = 2;
constexpr int kExitContract = 3;

struct RunOptions {
    std::string fn = "abs1d";
    std::size_t dim = 1;
    double eps = 0.1;
    double delta = 0.01;
    double gamma = 0.25;
    std::optional<double> lipschitz;
    std::optional<double> gap;
    std::string start = "canonical";
    std::uint64_t replicas = 1;
    std::uint64_t seed = 0;
    std::string trace = "off";
    std::string out;
    bool verify = false;
    std::size_t verify_samples = 500;
    std::optional<std::uint64_t> max_oracle_calls;
    std::optional<std::uint64_t> max_restarts;
    int threads = 0;
    bool serial = false;
};

void add_problem_flags(CLI::App* app, RunOptions& o) {
    app->add_option("--fn", o.fn, "corpus function id")->capture_default_str();
    app->add_option("--dim", o.dim, "problem dimension")->capture_default_str();
    app->add_option("--eps", o.eps, "stationarity tolerance epsilon")->capture_default_str();
    app->add_option("--delta", o.delta, "Goldstein ball radius delta")->capture_default_str();
    app->add_option("--lipschitz", o.lipschitz, "override the Lipschitz constant L");
}

pingd::ExperimentConfig to_config(const RunOptions& o) {
    pingd::ExperimentConfig c;
    c.function_id = o.fn;
    c.dim = o.dim;
    c.epsilon = o.eps;
    c.delta = o.delta;
    c.gamma = o.gamma;
    c.lipschitz = o.lipschitz;
    c.value_gap = o.gap;
    if (o.start != "canonical") c.start = pingd::parse_point(o.start);
    c.replicas = o.replicas;
    c.master_seed = o.seed;
    try {
        c.trace = pingd::parse_trace_level(o.trace);
    } catch (const std::invalid_argument& e) {
        throw pingd::ConfigError(e.what());
    }
    if (!o.out.empty()) c.out_dir = o.out;
    c.verify = o.verify;
    c.verify_samples = o.verify_samples;
    c.max_oracle_calls = o.max_oracle_calls;
    c.max_restarts_per_outer = o.max_restarts;
    c.threads = o.threads;
    c.execution = o.serial ? pingd::Execution::Serial : pingd::Execution::OpenMP;
    return c;
}

int cmd_run(const RunOptions& o) {
    const auto config = to_config(o);
    const auto problem = pingd::make_problem(config);
    pingd::SolverParams params;
    params.epsilon = config.epsilon;
    params.delta = config.delta;
    params.gamma = config.gamma;
    for (const auto& w : pingd::validate(params, problem)) std::cerr << "warning: " << w << '\n';

    const auto report = pingd::run_experiment(config);
    const auto& s = report.summary;
    std::cout << "function        " << config.function_id << " (d=" << config.dim << ", L=" << report.lipschitz
              << ", Delta=" << report.value_gap << ")\n"
              << "schedule        K=" << s.schedule.inner << " T=" << s.schedule.outer << '\n'
              << "replicas        " << s.replicas << '\n'
              << "stationary frac " << s.success_fraction << '\n'
              << "in-budget frac  " << s.fraction_within_budget << " (budget " << s.budget << ")\n"
              << "oracle calls    median " << s.oracle_calls.median << ", max " << s.oracle_calls.max << '\n'
              << "restart viol.   " << s.restarts.violation_fraction << " over " << s.restarts.pairs
              << " outer iterations (threshold " << s.restarts.threshold << ")\n"
              << "error flags     " << s.error_flags << '\n';
    if (s.certified_fraction) std::cout << "certified frac  " << *s.certified_fraction << '\n';
    if (config.out_dir) std::cout << "outputs         " << config.out_dir->string() << '\n';
    return s.contract_satisfied ? kExitOk : kExitContract;
}

int cmd_certify(const RunOptions& o, const std::string& point, const std::string& out) {
    const auto fn = pingd::make_function(o.fn, o.dim);
    const auto x = pingd::parse_point(point);
    if (x.dim() != fn->dim()) throw pingd::ConfigError("--point has the wrong dimension for " + o.fn);
    pingd::RngStream rng(o.seed, 0);
    const auto cert = pingd::certify(*fn, x, o.eps, o.delta, o.verify_samples, rng);
    const auto doc = pingd::to_json(cert, !out.empty());
    if (!out.empty()) {
        std::ofstream file(out, std::ios::binary);
        if (!file) throw std::runtime_error("cannot write " + out);
        file << doc << '\n';
        std::cout << pingd::to_string(cert.verdict) << " min_norm=" << cert.min_norm_value << '\n';
    } else {
        std::cout << doc << '\n';
    }
    return kExitOk;
}

int cmd_schedule(const RunOptions& o) {
    double lipschitz = 0.0;
    double gap = 0.0;
    if (o.lipschitz && o.gap) {
        lipschitz = *o.lipschitz;
        gap = *o.gap;
    } else {
        const auto problem = pingd::make_problem(to_config(o));
        lipschitz = problem.lipschitz();
        gap = problem.value_gap();
    }
    const auto sched = pingd::default_schedule(o.eps, o.delta, lipschitz, gap);
    const double budget = pingd::oracle_budget(o.eps, o.delta, lipschitz, gap, o.gamma);
    nlohmann::ordered_json j;
    j["epsilon"] = o.eps;
    j["delta"] = o.delta;
    j["lipschitz"] = lipschitz;
    j["value_gap"] = gap;
    j["gamma"] = o.gamma;
    j["K"] = sched.inner;
    j["T"] = sched.outer;
    j["oracle_budget"] = budget;
    std::cout << j.dump(2) << '\n';
    return kExitOk;
}

int cmd_corpus(std::size_t dim) {
    for (const auto& fn : pingd::corpus(dim)) {
        std::cout << fn->id() << "\tdim=" << fn->dim() << "\tL=" << fn->lipschitz() << "\tbox=[" << fn->domain().lower
                  << ", " << fn->domain().upper << "]\tkinks: " << fn->kink_description() << '\n';
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Perturbed INGD: Goldstein (eps, delta)-stationary points with a practical oracle"};
    app.require_subcommand(1);
    // CLI11 only reads config files at app level; fallthrough lets `run --config FILE` reach it
    app.set_config("--config", "", "INI config file; run options go under [run], flags override file values");
    app.fallthrough();

    RunOptions run_opts;
    auto* run = app.add_subcommand("run", "run seeded solver replicas and aggregate statistics");
    add_problem_flags(run, run_opts);
    run->add_option("--gamma", run_opts.gamma, "failure probability gamma")->capture_default_str();
    run->add_option("--gap", run_opts.gap, "value gap Delta (default f(start) - inf f)");
    run->add_option("--start", run_opts.start, "start point a,b,... or 'canonical'")->capture_default_str();
    run->add_option("--replicas", run_opts.replicas, "number of seeded replicas")->capture_default_str();
    run->add_option("--seed", run_opts.seed, "master seed")->capture_default_str();
    run->add_option("--trace", run_opts.trace, "off | summary | full")->capture_default_str();
    run->add_option("--out", run_opts.out, "output directory (results.csv, summary.json, traces)");
    run->add_flag("--verify", run_opts.verify, "certify every final point");
    run->add_option("--verify-samples", run_opts.verify_samples, "gradients sampled per certificate")
        ->capture_default_str();
    run->add_option("--max-oracle-calls", run_opts.max_oracle_calls, "per-run oracle call budget");
    run->add_option("--max-restarts", run_opts.max_restarts, "abort after this many restarts at one iterate");
    run->add_option("--threads", run_opts.threads, "worker threads (0 = OpenMP default)");
    run->add_flag("--serial", run_opts.serial, "use the serial reference loop");

    RunOptions cert_opts;
    std::string point;
    std::string cert_out;
    auto* cert = app.add_subcommand("certify", "certify a point as Goldstein (eps, delta)-stationary");
    add_problem_flags(cert, cert_opts);
    cert->add_option("--point", point, "point a,b,...")->required();
    cert->add_option("--verify-samples", cert_opts.verify_samples, "gradients to sample")->capture_default_str();
    cert->add_option("--seed", cert_opts.seed, "seed")->capture_default_str();
    cert->add_option("--out", cert_out, "write the full certificate JSON to this file");

    RunOptions sched_opts;
    auto* sched = app.add_subcommand("schedule", "print K, T and the oracle budget");
    add_problem_flags(sched, sched_opts);
    sched->add_option("--gamma", sched_opts.gamma, "failure probability gamma")->capture_default_str();
    sched->add_option("--gap", sched_opts.gap, "value gap Delta");

    std::size_t corpus_dim = 2;
    auto* corpus = app.add_subcommand("corpus", "list the built-in test functions");
    corpus->add_option("--dim", corpus_dim, "dimension for dimension-parameterized functions")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (*run) return cmd_run(run_opts);
        if (*cert) return cmd_certify(cert_opts, point, cert_out);
        if (*sched) return cmd_schedule(sched_opts);
        if (*corpus) return cmd_corpus(corpus_dim);
    } catch (const pingd::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitRuntime;
    }
    return kExitOk;
}
