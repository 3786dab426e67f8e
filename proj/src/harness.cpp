#include "pingd/harness.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <ctime>
#include <exception>
#include <fstream>
#include <iomanip>
#include <sstream>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "json.hpp"
#include "pingd/oracle.hpp"
#include "pingd/sampler.hpp"
#include "pingd/verifier.hpp"
#include "pingd/version.hpp"

namespace pingd {

namespace {

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

double quantile(std::vector<double> sorted, double q) {
    if (sorted.empty()) return 0.0;
    const double pos = q * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

std::uint64_t count_violations(const std::vector<std::uint64_t>& restarts, double threshold) {
    return static_cast<std::uint64_t>(std::count_if(restarts.begin(), restarts.end(), [threshold](std::uint64_t r) {
        return static_cast<double>(r) > threshold;
    }));
}

std::string utc_timestamp() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t tt = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&tt, &tm);
    std::ostringstream os;
    os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    return os.str();
}

}  // namespace

void validate(const ExperimentConfig& config) {
    if (config.replicas == 0) throw ConfigError("replicas must be >= 1");
    if (config.dim == 0) throw ConfigError("dim must be >= 1");
    if (!(config.epsilon > 0.0) || !std::isfinite(config.epsilon)) throw ConfigError("eps must be positive");
    if (!(config.delta > 0.0) || !std::isfinite(config.delta)) throw ConfigError("delta must be positive");
    if (!(config.gamma > 0.0 && config.gamma < 1.0)) throw ConfigError("gamma must lie in (0, 1)");
    if (config.lipschitz && !(*config.lipschitz > 0.0)) throw ConfigError("lipschitz must be positive");
    if (config.value_gap && !(*config.value_gap > 0.0)) throw ConfigError("value gap must be positive");
    if (config.verify && config.verify_samples == 0) throw ConfigError("verify-samples must be >= 1");
    if (config.max_oracle_calls && *config.max_oracle_calls == 0) throw ConfigError("max-oracle-calls must be >= 1");
    if (config.max_restarts_per_outer && *config.max_restarts_per_outer == 0) {
        throw ConfigError("max-restarts-per-outer must be >= 1");
    }
    const auto ids = corpus_ids();
    if (std::find(ids.begin(), ids.end(), config.function_id) == ids.end()) {
        throw ConfigError("unknown function id '" + config.function_id + "'");
    }
}

ProblemSpec make_problem(const ExperimentConfig& config) {
    validate(config);
    try {
        const auto fn = make_function(config.function_id, config.dim);
        return ProblemSpec::from_function(fn, config.start, config.lipschitz, config.value_gap);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
}

ReplicaOutcome run_replica(const ExperimentConfig& config, const ProblemSpec& problem, std::uint64_t replica) {
    SolverParams params;
    params.epsilon = config.epsilon;
    params.delta = config.delta;
    params.gamma = config.gamma;
    params.seed = config.master_seed;
    params.stream = replica;
    params.max_oracle_calls = config.max_oracle_calls;
    params.max_restarts_per_outer = config.max_restarts_per_outer;
    params.trace = config.trace;

    auto [result, trace] = run(problem, params, config.schedule);
    const double budget =
        oracle_budget(config.epsilon, config.delta, problem.lipschitz(), problem.value_gap(), config.gamma);

    ReplicaRow row;
    row.replica = replica;
    row.seed = params.seed;
    row.stream = params.stream;
    row.status = result.status;
    row.oracle_calls = result.oracle_calls;
    row.outer_steps = result.outer_steps;
    row.restarts_per_outer = result.restarts_per_outer;
    row.total_restarts = result.total_restarts();
    row.max_restarts = result.max_restarts();
    row.final_f = result.final_value;
    row.final_m_norm = result.final_momentum_norm;
    row.max_query_distance = result.max_query_distance;
    row.min_descent_decrease = result.min_descent_decrease;
    row.error_flags = result.error_flags;
    row.within_budget = result.status == RunStatus::Stationary && static_cast<double>(result.oracle_calls) <= budget;
    row.wall_time = result.wall_time;

    if (config.verify) {
        RngStream vrng(config.master_seed, kVerifierStreamOffset + replica);
        const auto cert = certify(problem.oracle(), result.final_point, config.epsilon, config.delta,
                                  config.verify_samples, vrng);
        row.certified = cert.verdict == Verdict::Certified;
        row.min_norm_value = cert.min_norm_value;
    }
    return {std::move(row), std::move(trace)};
}

std::vector<ReplicaOutcome> run_replicas(const ExperimentConfig& config, const ProblemSpec& problem,
                                         Execution execution) {
    const auto n = static_cast<std::int64_t>(config.replicas);
    std::vector<ReplicaOutcome> outcomes(static_cast<std::size_t>(n));
    if (execution == Execution::Serial) {
        for (std::int64_t i = 0; i < n; ++i) {
            outcomes[static_cast<std::size_t>(i)] = run_replica(config, problem, static_cast<std::uint64_t>(i));
        }
        return outcomes;
    }

    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(n));
#ifdef _OPENMP
    const int threads = config.threads > 0 ? config.threads : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
#endif
    for (std::int64_t i = 0; i < n; ++i) {
        try {
            outcomes[static_cast<std::size_t>(i)] = run_replica(config, problem, static_cast<std::uint64_t>(i));
        } catch (...) {
            errors[static_cast<std::size_t>(i)] = std::current_exception();
        }
    }
    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
    return outcomes;
}

RestartStatistics restart_statistics(const std::vector<ReplicaRow>& rows, double gamma) {
    if (!(gamma > 0.0 && gamma < 1.0)) throw std::invalid_argument("gamma must lie in (0, 1)");
    RestartStatistics stats;
    stats.threshold = std::log(1.0 / gamma);
    for (const auto& row : rows) {
        stats.pairs += row.restarts_per_outer.size();
        stats.violations += count_violations(row.restarts_per_outer, stats.threshold);
    }
    if (stats.pairs > 0) {
        stats.violation_fraction = static_cast<double>(stats.violations) / static_cast<double>(stats.pairs);
        stats.stderr_bound = std::sqrt(gamma * (1.0 - gamma) / static_cast<double>(stats.pairs));
    }
    stats.within_contract = stats.violation_fraction <= gamma + 3.0 * stats.stderr_bound;
    return stats;
}

RestartStatistics restart_statistics(const AggregateReport& report, double gamma) {
    if (report.rows.empty()) throw std::invalid_argument("restart_statistics: empty report");
    return restart_statistics(report.rows, gamma);
}

ReportSummary summarize(const std::vector<ReplicaRow>& rows, const ExperimentConfig& config, double lipschitz,
                        double value_gap) {
    ReportSummary s;
    s.replicas = rows.size();
    s.schedule = config.schedule ? *config.schedule
                                 : default_schedule(config.epsilon, config.delta, lipschitz, value_gap);
    s.budget = oracle_budget(config.epsilon, config.delta, lipschitz, value_gap, config.gamma);
    s.restarts = restart_statistics(rows, config.gamma);
    if (rows.empty()) return s;

    std::uint64_t stationary = 0;
    std::uint64_t within = 0;
    std::uint64_t certified = 0;
    std::vector<double> calls;
    for (const auto& row : rows) {
        if (row.status == RunStatus::Stationary) {
            ++stationary;
            if (row.certified.value_or(false)) ++certified;
        }
        if (row.within_budget) ++within;
        s.error_flags += row.error_flags;
        s.total_oracle_calls += row.oracle_calls;
        calls.push_back(static_cast<double>(row.oracle_calls));
    }
    std::sort(calls.begin(), calls.end());
    s.oracle_calls = {calls.front(),          quantile(calls, 0.25), quantile(calls, 0.5),
                      quantile(calls, 0.75),  quantile(calls, 0.9),  calls.back()};
    const auto n = static_cast<double>(rows.size());
    s.success_fraction = static_cast<double>(stationary) / n;
    s.fraction_within_budget = static_cast<double>(within) / n;
    if (config.verify && stationary > 0) {
        s.certified_fraction = static_cast<double>(certified) / static_cast<double>(stationary);
    }
    s.contract_satisfied = s.fraction_within_budget >= 1.0 - config.gamma && s.restarts.within_contract &&
                           s.error_flags == 0 && (!s.certified_fraction || *s.certified_fraction == 1.0);
    return s;
}

std::string csv_field(std::string_view text) {
    if (text.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(text);
    std::string out = "\"";
    for (char c : text) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

std::string csv_header() {
    return "replica,seed,stream,status,oracle_calls,outer_steps,outer_iterations,total_restarts,max_restarts,"
           "restart_violations,final_f,final_m_norm,max_query_distance,min_descent_decrease,error_flags,"
           "within_budget,certified,min_norm_value";
}

void write_csv(std::ostream& out, const std::vector<ReplicaRow>& rows, double gamma) {
    const double threshold = std::log(1.0 / gamma);
    out << csv_header() << "\r\n";
    for (const auto& r : rows) {
        std::vector<std::string> fields{
            std::to_string(r.replica),
            std::to_string(r.seed),
            std::to_string(r.stream),
            std::string(to_string(r.status)),
            std::to_string(r.oracle_calls),
            std::to_string(r.outer_steps),
            std::to_string(r.restarts_per_outer.size()),
            std::to_string(r.total_restarts),
            std::to_string(r.max_restarts),
            std::to_string(count_violations(r.restarts_per_outer, threshold)),
            format_double(r.final_f),
            format_double(r.final_m_norm),
            format_double(r.max_query_distance),
            std::isinf(r.min_descent_decrease) ? std::string() : format_double(r.min_descent_decrease),
            std::to_string(r.error_flags),
            r.within_budget ? "true" : "false",
            r.certified ? (*r.certified ? "true" : "false") : "",
            r.min_norm_value ? format_double(*r.min_norm_value) : "",
        };
        for (std::size_t i = 0; i < fields.size(); ++i) {
            if (i) out << ',';
            out << csv_field(fields[i]);
        }
        out << "\r\n";
    }
}

std::string summary_json(const AggregateReport& report) {
    const auto& c = report.config;
    const auto& s = report.summary;
    nlohmann::ordered_json j;
    j["library_version"] = std::string(kVersion);
    j["rng"] = std::string(RngStream::identity);
    j["schema"] = "schemas/summary.schema.json";

    auto& cfg = j["config"];
    cfg["function"] = c.function_id;
    cfg["dim"] = c.dim;
    cfg["epsilon"] = c.epsilon;
    cfg["delta"] = c.delta;
    cfg["gamma"] = c.gamma;
    cfg["lipschitz"] = report.lipschitz;
    cfg["value_gap"] = report.value_gap;
    cfg["start"] = c.start ? nlohmann::ordered_json(c.start->values()) : nlohmann::ordered_json("canonical");
    cfg["replicas"] = c.replicas;
    cfg["master_seed"] = c.master_seed;
    cfg["trace"] = std::string(to_string(c.trace));
    cfg["verify"] = c.verify;
    cfg["verify_samples"] = c.verify_samples;
    cfg["max_oracle_calls"] = c.max_oracle_calls ? nlohmann::ordered_json(*c.max_oracle_calls) : nullptr;
    cfg["max_restarts_per_outer"] =
        c.max_restarts_per_outer ? nlohmann::ordered_json(*c.max_restarts_per_outer) : nullptr;

    auto& sum = j["summary"];
    sum["replicas"] = s.replicas;
    sum["K"] = s.schedule.inner;
    sum["T"] = s.schedule.outer;
    sum["success_fraction"] = s.success_fraction;
    sum["oracle_budget"] = s.budget;
    sum["fraction_within_budget"] = s.fraction_within_budget;
    sum["oracle_calls"] = {{"min", s.oracle_calls.min},     {"p25", s.oracle_calls.p25},
                           {"median", s.oracle_calls.median}, {"p75", s.oracle_calls.p75},
                           {"p90", s.oracle_calls.p90},     {"max", s.oracle_calls.max}};
    sum["total_oracle_calls"] = s.total_oracle_calls;
    sum["restarts"] = {{"pairs", s.restarts.pairs},
                       {"violations", s.restarts.violations},
                       {"threshold", s.restarts.threshold},
                       {"violation_fraction", s.restarts.violation_fraction},
                       {"stderr", s.restarts.stderr_bound},
                       {"within_contract", s.restarts.within_contract}};
    sum["certified_fraction"] = s.certified_fraction ? nlohmann::ordered_json(*s.certified_fraction) : nullptr;
    sum["error_flags"] = s.error_flags;
    sum["contract_satisfied"] = s.contract_satisfied;

    auto& meta = j["meta"];
    meta["finished_at"] = utc_timestamp();
    meta["wall_time_seconds"] = report.wall_time;
    double replica_time = 0.0;
    for (const auto& r : report.rows) replica_time += r.wall_time;
    meta["replica_wall_time_seconds"] = replica_time;
    return j.dump(2);
}

AggregateReport run_experiment(const ExperimentConfig& config) {
    const auto problem = make_problem(config);
    if (config.out_dir) {
        std::error_code ec;
        std::filesystem::create_directories(*config.out_dir, ec);
        if (ec) throw std::runtime_error("cannot create output directory " + config.out_dir->string() + ": " + ec.message());
    }

    const auto started = std::chrono::steady_clock::now();
    auto outcomes = run_replicas(config, problem, config.execution);

    AggregateReport report;
    report.config = config;
    report.lipschitz = problem.lipschitz();
    report.value_gap = problem.value_gap();
    report.rows.reserve(outcomes.size());
    for (auto& o : outcomes) {
        if (config.out_dir && config.trace == TraceLevel::Full) {
            const auto path = *config.out_dir / ("trace_" + std::to_string(o.row.replica) + ".jsonl");
            std::ofstream out(path, std::ios::binary);
            if (!out) throw std::runtime_error("cannot write " + path.string());
            write_jsonl(out, o.trace);
        }
        report.rows.push_back(std::move(o.row));
        if (config.keep_traces) report.traces.push_back(std::move(o.trace));
    }
    report.summary = summarize(report.rows, config, report.lipschitz, report.value_gap);
    report.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();

    if (config.out_dir) {
        const auto csv_path = *config.out_dir / "results.csv";
        std::ofstream csv(csv_path, std::ios::binary);
        if (!csv) throw std::runtime_error("cannot write " + csv_path.string());
        write_csv(csv, report.rows, config.gamma);
        const auto json_path = *config.out_dir / "summary.json";
        std::ofstream js(json_path, std::ios::binary);
        if (!js) throw std::runtime_error("cannot write " + json_path.string());
        js << summary_json(report) << '\n';
    }
    return report;
}

Vector parse_point(std::string_view text) {
    std::vector<double> coords;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t comma = std::min(text.find(',', pos), text.size());
        std::string_view token = text.substr(pos, comma - pos);
        while (!token.empty() && token.front() == ' ') token.remove_prefix(1);
        while (!token.empty() && token.back() == ' ') token.remove_suffix(1);
        double v = 0.0;
        const auto res = std::from_chars(token.data(), token.data() + token.size(), v);
        if (token.empty() || res.ec != std::errc() || res.ptr != token.data() + token.size() || !std::isfinite(v)) {
            throw ConfigError("malformed point '" + std::string(text) + "'");
        }
        coords.push_back(v);
        pos = comma + 1;
    }
    return Vector(std::move(coords));
}

}  // namespace pingd
