#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <string_view>
#include <utility>
#include <vector>

#include "pingd/problem.hpp"
#include "pingd/sampler.hpp"
#include "pingd/trace.hpp"
#include "pingd/vector.hpp"

namespace pingd {

/// Inner loop length K and outer iteration count T.
struct Schedule {
    std::uint64_t inner = 0;  // K
    std::uint64_t outer = 0;  // T
};

/// K = ceil(80 L^2 / eps^2), T = ceil(4 Delta / (eps delta)).
/// Throws std::overflow_error when a ceiling does not fit in 63 bits.
Schedule default_schedule(double epsilon, double delta, double lipschitz, double value_gap);

/// Total oracle calls 320 Delta L^2 / (eps^3 delta) * ln(4 Delta / (gamma eps delta))
/// that suffice for success probability 1 - gamma.
double oracle_budget(double epsilon, double delta, double lipschitz, double value_gap, double gamma);

/// Momentum weight minimizing the second-moment bound; lies in [1/2, 1) for
/// 0 < m_norm <= L. Throws std::domain_error outside that range.
double beta_coefficient(double m_norm, double lipschitz);

/// x_t - (1 - ||m||/8L) delta m/||m||. Throws std::domain_error when m = 0.
Vector trial_point(const Vector& x_t, const Vector& m, double delta, double lipschitz);

/// Strict sufficient-decrease test f_trial - f_current < -(delta/4) ||m||.
bool descent_test(double f_trial, double f_current, double m_norm, double delta);

/// beta m + (1 - beta) g.
Vector momentum_update(const Vector& m, const Vector& g, double beta);

// Quantities from the second-moment analysis of the momentum recursion.
// h(beta) bounds E||m_{k+1}||^2 given ||m_k|| = m_norm; c1 is the closed form
// of (1/||m||^2 - L^2 h(beta*) / ||m||^4).
double momentum_bound_objective(double beta, double m_norm, double lipschitz);
double contraction_constant(double m_norm, double lipschitz);

enum class RunStatus { Stationary, BudgetExhausted, OuterLimitReached, OracleError, RestartLimitReached };

std::string_view to_string(RunStatus status);

struct RunResult {
    Vector final_point;
    double final_value = 0.0;
    double final_momentum_norm = 0.0;
    RunStatus status = RunStatus::OuterLimitReached;
    std::uint64_t oracle_calls = 0;
    std::uint64_t outer_steps = 0;  // accepted descent steps
    std::vector<std::uint64_t> restarts_per_outer;
    double max_query_distance = 0.0;  // max ||y - x_t|| over inner-loop queries
    double min_descent_decrease = std::numeric_limits<double>::infinity();
    std::uint64_t error_flags = 0;
    double wall_time = 0.0;  // seconds

    [[nodiscard]] std::uint64_t total_restarts() const;
    [[nodiscard]] std::uint64_t max_restarts() const;
};

/// Perturbed interpolated normalized gradient descent.
///
/// Outer loop over accepted iterates x_t; for each, an inner block seeds the
/// momentum with the gradient at x_t and runs up to K steps. Each step either
/// terminates (||m|| <= eps, x_t is returned), accepts the trial point on
/// sufficient decrease, or queries the oracle at a point drawn uniformly from
/// the segment [x_t, x_{t,k} + (delta ||m|| / 8L) b], where b is the part of a
/// truncated (d+1)-sphere sample orthogonal to the step direction, and mixes
/// the gradient into m. A block that exhausts K steps restarts at the same x_t.
///
/// Every oracle query (gradient at x_t and y, value at x_{t,k}) counts
/// toward oracle_calls. The schedule defaults to default_schedule.
std::pair<RunResult, Trace> run(const ProblemSpec& problem, const SolverParams& params,
                                std::optional<Schedule> schedule = std::nullopt);

enum class EpisodeEnd { Completed, Descent, Terminated, OracleError, BudgetExhausted };

struct InnerEpisode {
    EpisodeEnd end = EpisodeEnd::Completed;
    std::uint64_t steps = 0;
    /// m after K steps; zero when the episode broke early.
    Vector final_momentum;
    std::uint64_t oracle_calls = 0;
    std::uint64_t error_flags = 0;
    double max_query_distance = 0.0;
};

/// One inner block at a fixed x_t, started from the gradient at x_t and run
/// for `inner_steps` momentum updates. With `stop_on_small_momentum` false the
/// ||m|| <= eps exit is disabled so the recursion itself can be observed.
InnerEpisode inner_episode(const ProblemSpec& problem, const Vector& x_t, const SolverParams& params,
                           std::uint64_t inner_steps, bool stop_on_small_momentum);

}  // namespace pingd
