#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "pingd/harness.hpp"
#include "support/reference.hpp"

using namespace pingd;

namespace {

ExperimentConfig small_config() {
    ExperimentConfig c;
    c.function_id = "euclid";
    c.dim = 3;
    c.epsilon = 0.3;
    c.delta = 0.05;
    c.replicas = 8;
    c.master_seed = 21;
    c.verify = true;
    c.verify_samples = 100;
    return c;
}

std::string csv_of(const AggregateReport& r) {
    std::ostringstream os;
    write_csv(os, r.rows, r.config.gamma);
    return os.str();
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

bool same_row(const ReplicaRow& a, const ReplicaRow& b) {
    return a.replica == b.replica && a.status == b.status && a.oracle_calls == b.oracle_calls &&
           a.restarts_per_outer == b.restarts_per_outer && a.final_f == b.final_f &&
           a.final_m_norm == b.final_m_norm && a.certified == b.certified && a.min_norm_value == b.min_norm_value;
}

}  // namespace

TEST_CASE("csv field quoting") {
    CHECK(csv_field("plain") == "plain");
    CHECK(csv_field("a,b") == "\"a,b\"");
    CHECK(csv_field("say \"hi\"") == "\"say \"\"hi\"\"\"");
    CHECK(csv_field("line\nbreak") == "\"line\nbreak\"");
}

TEST_CASE("parse_point") {
    CHECK(parse_point("1,-2.5, 3e-1") == Vector{1.0, -2.5, 0.3});
    CHECK(parse_point("4") == Vector{4.0});
    CHECK_THROWS_AS((void)parse_point(""), ConfigError);
    CHECK_THROWS_AS((void)parse_point("1,,2"), ConfigError);
    CHECK_THROWS_AS((void)parse_point("1,x"), ConfigError);
}

TEST_CASE("config validation fails before any run") {
    auto c = small_config();
    c.replicas = 0;
    CHECK_THROWS_AS(validate(c), ConfigError);
    c = small_config();
    c.function_id = "missing";
    CHECK_THROWS_AS((void)run_experiment(c), ConfigError);
    c = small_config();
    c.gamma = 1.2;
    CHECK_THROWS_AS((void)run_experiment(c), ConfigError);
    c = small_config();
    c.start = Vector{0.0, 0.0, 0.0};  // kink of euclid
    CHECK_THROWS_AS((void)make_problem(c), ConfigError);
    c.start = Vector{1.0, 0.0};
    CHECK_THROWS_AS((void)make_problem(c), ConfigError);
}

TEST_CASE("restart_statistics examples") {
    ReplicaRow quiet;
    quiet.restarts_per_outer = {0, 0, 0, 0};
    auto s = restart_statistics(std::vector<ReplicaRow>{quiet, quiet}, 0.25);
    CHECK(s.violation_fraction == 0.0);
    CHECK(s.pairs == 8);
    CHECK(s.within_contract);

    ReplicaRow mixed;
    mixed.restarts_per_outer = {0, 1, 2, 5};
    s = restart_statistics(std::vector<ReplicaRow>{mixed}, 0.25);
    CHECK(s.threshold == doctest::Approx(std::log(4.0)));
    CHECK(s.violations == 2);  // counts >= 2 exceed ln 4
    CHECK(s.violation_fraction == 0.5);
    CHECK(s.stderr_bound == doctest::Approx(std::sqrt(0.25 * 0.75 / 4.0)));

    AggregateReport empty;
    CHECK_THROWS_AS((void)restart_statistics(empty, 0.25), std::invalid_argument);
}

TEST_CASE("serial and OpenMP replicas agree") {
    const auto config = small_config();
    const auto problem = make_problem(config);
    const auto serial = run_replicas(config, problem, Execution::Serial);
    auto parallel_config = config;
    parallel_config.threads = 4;
    const auto parallel = run_replicas(parallel_config, problem, Execution::OpenMP);
    REQUIRE(serial.size() == parallel.size());
    for (std::size_t i = 0; i < serial.size(); ++i) CHECK(same_row(serial[i].row, parallel[i].row));
    // a replica depends only on its index
    const auto lone = run_replica(config, problem, 5);
    CHECK(same_row(lone.row, serial[5].row));
}

TEST_CASE("run_experiment summary is recomputable and deterministic") {
    const auto config = small_config();
    const auto a = run_experiment(config);
    const auto b = run_experiment(config);
    REQUIRE(a.rows.size() == config.replicas);
    CHECK(csv_of(a) == csv_of(b));
    const auto again = summarize(a.rows, config, a.lipschitz, a.value_gap);
    CHECK(again.success_fraction == a.summary.success_fraction);
    CHECK(again.fraction_within_budget == a.summary.fraction_within_budget);
    CHECK(again.oracle_calls.median == a.summary.oracle_calls.median);
    CHECK(again.restarts.violations == a.summary.restarts.violations);
    // budget column against an independent closed form
    CHECK(a.summary.budget == doctest::Approx(static_cast<double>(
                                  reference::budget(0.3, 0.05, 1.0, a.value_gap, 0.25))).epsilon(1e-12));
    CHECK(a.summary.success_fraction == 1.0);
    REQUIRE(a.summary.certified_fraction);
    CHECK(*a.summary.certified_fraction == 1.0);
    CHECK(a.summary.contract_satisfied);
}

TEST_CASE("run_experiment writes csv, summary and traces") {
    auto config = small_config();
    config.replicas = 3;
    config.trace = TraceLevel::Full;
    const auto dir = std::filesystem::temp_directory_path() / "pingd_harness_test";
    std::filesystem::remove_all(dir);
    config.out_dir = dir;
    const auto report = run_experiment(config);
    const auto csv = slurp(dir / "results.csv");
    CHECK(csv.rfind(csv_header() + "\r\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);
    const auto summary = nlohmann::json::parse(slurp(dir / "summary.json"));
    CHECK(summary["config"]["function"] == "euclid");
    CHECK(summary["summary"]["replicas"] == 3);
    CHECK(summary["rng"] == std::string(RngStream::identity));
    for (int i = 0; i < 3; ++i) {
        const auto trace = slurp(dir / ("trace_" + std::to_string(i) + ".jsonl"));
        std::istringstream lines(trace);
        std::string line;
        std::getline(lines, line);
        CHECK(nlohmann::json::parse(line)["trace_header"] == true);
        std::uint64_t calls = 0;
        while (std::getline(lines, line)) calls += nlohmann::json::parse(line)["kind"] == "OracleCall";
        CHECK(calls == report.rows[static_cast<std::size_t>(i)].oracle_calls);
    }
    std::filesystem::remove_all(dir);
}

TEST_CASE("contract flags a run that misses its budget") {
    auto config = small_config();
    config.verify = false;
    config.max_oracle_calls = 3;
    const auto report = run_experiment(config);
    CHECK(report.summary.success_fraction == 0.0);
    CHECK_FALSE(report.summary.contract_satisfied);
}
