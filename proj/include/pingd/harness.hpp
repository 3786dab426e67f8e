#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "pingd/problem.hpp"
#include "pingd/solver.hpp"
#include "pingd/trace.hpp"

namespace pingd {

class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

enum class Execution { Serial, OpenMP };

struct ExperimentConfig {
    std::string function_id = "abs1d";
    std::size_t dim = 1;
    double epsilon = 0.1;
    double delta = 0.01;
    double gamma = 0.25;
    std::optional<double> lipschitz;  // defaults to the function's declared L
    std::optional<Vector> start;      // nullopt = canonical start
    std::optional<double> value_gap;  // defaults to f(start) - inf f
    std::uint64_t replicas = 1;
    std::uint64_t master_seed = 0;
    TraceLevel trace = TraceLevel::Off;
    std::optional<std::filesystem::path> out_dir;
    bool verify = false;
    std::size_t verify_samples = 500;
    std::optional<std::uint64_t> max_oracle_calls;
    std::optional<std::uint64_t> max_restarts_per_outer;
    Execution execution = Execution::OpenMP;
    int threads = 0;          // 0 = OpenMP default
    bool keep_traces = false;  // retain traces in the report (in-process use)
    std::optional<Schedule> schedule;
};

/// Throws ConfigError describing the first invalid field.
void validate(const ExperimentConfig& config);

/// Stream id offset separating verifier draws from solver draws of a replica.
inline constexpr std::uint64_t kVerifierStreamOffset = std::uint64_t{1} << 40;

struct ReplicaRow {
    std::uint64_t replica = 0;
    std::uint64_t seed = 0;
    std::uint64_t stream = 0;
    RunStatus status = RunStatus::OuterLimitReached;
    std::uint64_t oracle_calls = 0;
    std::uint64_t outer_steps = 0;
    std::vector<std::uint64_t> restarts_per_outer;
    std::uint64_t total_restarts = 0;
    std::uint64_t max_restarts = 0;
    double final_f = 0.0;
    double final_m_norm = 0.0;
    double max_query_distance = 0.0;
    double min_descent_decrease = 0.0;  // +inf when no step was accepted
    std::uint64_t error_flags = 0;
    bool within_budget = false;  // Stationary and oracle_calls <= budget
    std::optional<bool> certified;
    std::optional<double> min_norm_value;
    double wall_time = 0.0;
};

struct OracleCallQuantiles {
    double min = 0, p25 = 0, median = 0, p75 = 0, p90 = 0, max = 0;
};

struct RestartStatistics {
    std::uint64_t pairs = 0;       // (replica, outer iteration) pairs
    std::uint64_t violations = 0;  // pairs with restarts > ln(1/gamma)
    double threshold = 0.0;
    double violation_fraction = 0.0;
    double stderr_bound = 0.0;  // sqrt(gamma (1 - gamma) / pairs)
    bool within_contract = true;  // fraction <= gamma + 3 stderr
};

struct ReportSummary {
    std::uint64_t replicas = 0;
    double success_fraction = 0.0;  // Stationary
    OracleCallQuantiles oracle_calls;
    double budget = 0.0;
    double fraction_within_budget = 0.0;
    RestartStatistics restarts;
    std::optional<double> certified_fraction;  // among Stationary runs
    std::uint64_t error_flags = 0;
    std::uint64_t total_oracle_calls = 0;
    Schedule schedule;
    bool contract_satisfied = false;
};

struct AggregateReport {
    ExperimentConfig config;
    double lipschitz = 0.0;
    double value_gap = 0.0;
    std::vector<ReplicaRow> rows;  // seed order
    ReportSummary summary;
    std::vector<Trace> traces;  // only with keep_traces
    double wall_time = 0.0;
};

/// Resolves the config into a validated problem (function, start, L, Delta).
ProblemSpec make_problem(const ExperimentConfig& config);

/// Runs replica i (solver stream (master_seed, i)) and, when requested,
/// certifies its final point. Replica results depend only on i.
struct ReplicaOutcome {
    ReplicaRow row;
    Trace trace;
};
ReplicaOutcome run_replica(const ExperimentConfig& config, const ProblemSpec& problem, std::uint64_t replica);

/// All replicas in index order. The OpenMP path runs them on a worker pool;
/// Serial is the reference loop and produces identical outcomes.
std::vector<ReplicaOutcome> run_replicas(const ExperimentConfig& config, const ProblemSpec& problem,
                                         Execution execution);

/// Runs every replica, aggregates in seed order and writes outputs when
/// out_dir is set: results.csv, summary.json, and trace_<i>.jsonl at full
/// trace level.
AggregateReport run_experiment(const ExperimentConfig& config);

/// Recomputes the summary from rows alone.
ReportSummary summarize(const std::vector<ReplicaRow>& rows, const ExperimentConfig& config, double lipschitz,
                        double value_gap);

RestartStatistics restart_statistics(const AggregateReport& report, double gamma);
RestartStatistics restart_statistics(const std::vector<ReplicaRow>& rows, double gamma);

/// Fixed column order, see csv_header(). `gamma` sets the restart_violations
/// threshold ln(1/gamma).
std::string csv_header();
void write_csv(std::ostream& out, const std::vector<ReplicaRow>& rows, double gamma);
/// RFC-4180 field quoting.
std::string csv_field(std::string_view text);

std::string summary_json(const AggregateReport& report);

/// Parses "a,b,c" into a vector; throws ConfigError on malformed input.
Vector parse_point(std::string_view text);

}  // namespace pingd
