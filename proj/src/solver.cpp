#include "pingd/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>
#include <string>

namespace pingd {

namespace {

// Ceiling that ignores floating-point noise just above an integer, e.g.
// 80 / 0.1^2 = 8000.000000000002.
std::uint64_t noise_tolerant_ceil(double value, const char* what) {
    if (!std::isfinite(value) || value >= 9.2e18) {
        throw std::overflow_error(std::string("default_schedule: ") + what + " = " + std::to_string(value) +
                                  " does not fit in a 63-bit integer");
    }
    const double floor_value = std::floor(value);
    if (value - floor_value <= 1e-12 * std::max(1.0, floor_value)) {
        return std::max<std::uint64_t>(1, static_cast<std::uint64_t>(floor_value));
    }
    return static_cast<std::uint64_t>(floor_value) + 1;
}

void require_positive(double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) throw std::invalid_argument(std::string(name) + " must be positive and finite");
}

// Gradient norms may exceed L by rounding (e.g. x/||x||).
constexpr double kLipschitzSlack = 1e-9;

/// Shared state of one solver run or inner episode.
class RunContext {
public:
    RunContext(const ProblemSpec& problem, const SolverParams& params)
        : problem_(problem), params_(params), rng_(params.seed, params.stream) {
        trace_.level = params.trace;
        trace_.oracle_id = problem.oracle_id();
        trace_.seed = params.seed;
        trace_.stream = params.stream;
    }

    [[nodiscard]] bool budget_left() const {
        return !params_.max_oracle_calls || calls_ < *params_.max_oracle_calls;
    }

    OracleResponse query(const Vector& x, std::uint64_t t, std::uint64_t k, bool deterministic) {
        auto response = problem_.oracle().evaluate(x);
        ++calls_;
        if (trace_.records(EventKind::OracleCall)) {
            EventPayload p;
            p.point = x;
            p.value = response.value;
            p.differentiable = response.differentiable();
            p.deterministic_point = deterministic;
            emit(EventKind::OracleCall, t, k, std::move(p));
        }
        return response;
    }

    void flag_error(const Vector& x, std::uint64_t t, std::uint64_t k, bool deterministic) {
        ++error_flags_;
        EventPayload p;
        p.point = x;
        p.deterministic_point = deterministic;
        emit(EventKind::ErrorFlag, t, k, std::move(p));
    }

    void emit(EventKind kind, std::uint64_t t, std::uint64_t k, EventPayload payload) {
        if (!trace_.records(kind)) return;
        trace_.push(TraceEvent{kind, t, k, calls_, std::move(payload)});
    }

    double checked_norm(const Vector& g) const {
        const double n = norm(g);
        const double L = problem_.lipschitz();
        if (n > L * (1.0 + kLipschitzSlack)) {
            throw std::runtime_error("gradient norm " + std::to_string(n) + " exceeds the Lipschitz constant " +
                                     std::to_string(L) + " of " + problem_.oracle_id());
        }
        return std::min(n, L);
    }

    const ProblemSpec& problem() const { return problem_; }
    const SolverParams& params() const { return params_; }
    RngStream& rng() { return rng_; }
    std::uint64_t calls() const { return calls_; }
    std::uint64_t error_flags() const { return error_flags_; }
    Trace take_trace() { return std::move(trace_); }

    double max_query_distance = 0.0;

private:
    const ProblemSpec& problem_;
    const SolverParams& params_;
    RngStream rng_;
    Trace trace_;
    std::uint64_t calls_ = 0;
    std::uint64_t error_flags_ = 0;
};

enum class BlockEnd { Terminated, Descent, Exhausted, OracleError, BudgetExhausted };

struct BlockResult {
    BlockEnd end = BlockEnd::Exhausted;
    Vector momentum;
    double m_norm = 0.0;
    std::uint64_t steps = 0;
    Vector accepted_point;
    double accepted_value = 0.0;
};

/// Runs k = 1..K at fixed x_t from momentum m_{t,1}.
BlockResult inner_block(RunContext& ctx, const Vector& x_t, double f_t, Vector m, std::uint64_t t,
                        std::uint64_t inner_steps, bool stop_on_small_momentum) {
    const double eps = ctx.params().epsilon;
    const double delta = ctx.params().delta;
    const double L = ctx.problem().lipschitz();
    const std::size_t d = x_t.dim();

    BlockResult out;
    double m_norm = ctx.checked_norm(m);
    for (std::uint64_t k = 1; k <= inner_steps; ++k) {
        out.steps = k - 1;
        // beta(0) = 1, so m = 0 is a fixed point of the recursion; with the
        // termination test off the remaining steps are trivial
        if (!stop_on_small_momentum && m_norm == 0.0) {
            out.steps = inner_steps;
            out.end = BlockEnd::Exhausted;
            out.momentum = std::move(m);
            out.m_norm = 0.0;
            return out;
        }
        // checked before the trial point so ||m|| never vanishes in the division
        if ((stop_on_small_momentum && m_norm <= eps) || m_norm == 0.0) {
            out.end = BlockEnd::Terminated;
            out.momentum = std::move(m);
            out.m_norm = m_norm;
            return out;
        }

        Vector x_tk = trial_point(x_t, m, delta, L);
        if (!ctx.budget_left()) {
            out.end = BlockEnd::BudgetExhausted;
            break;
        }
        const double f_tk = ctx.query(x_tk, t, k, true).value;
        if (ctx.params().trace == TraceLevel::Full) {
            EventPayload p;
            p.point = x_tk;
            p.value = f_tk;
            p.f_current = f_t;
            p.m_norm = m_norm;
            ctx.emit(EventKind::TrialPoint, t, k, std::move(p));
        }
        if (descent_test(f_tk, f_t, m_norm, delta)) {
            EventPayload p;
            p.point = x_tk;
            p.value = f_tk;
            p.f_current = f_t;
            p.m_norm = m_norm;
            ctx.emit(EventKind::DescentAccept, t, k, std::move(p));
            out.end = BlockEnd::Descent;
            out.accepted_point = std::move(x_tk);
            out.accepted_value = f_tk;
            out.momentum = std::move(m);
            out.m_norm = m_norm;
            return out;
        }

        // conic perturbation of the segment endpoint
        const Vector axis = x_t - x_tk;
        const Vector u = sample_sphere(d + 1, ctx.rng());
        const Vector b = conic_component(u.head(d), axis);
        const Vector endpoint = x_tk + (delta * m_norm / (8.0 * L)) * b;
        auto [y, lambda] = sample_segment(x_t, endpoint, ctx.rng());
        const double dist = distance(y, x_t);
        ctx.max_query_distance = std::max(ctx.max_query_distance, dist);

        if (!ctx.budget_left()) {
            out.end = BlockEnd::BudgetExhausted;
            break;
        }
        const auto response = ctx.query(y, t, k, false);
        if (!response.differentiable()) {
            ctx.flag_error(y, t, k, false);
            out.end = BlockEnd::OracleError;
            break;
        }
        const double beta = beta_coefficient(m_norm, L);
        m = momentum_update(m, *response.gradient, beta);
        m_norm = ctx.checked_norm(m);
        if (ctx.params().trace == TraceLevel::Full) {
            EventPayload p;
            p.point = std::move(y);
            p.lambda = lambda;
            p.beta = beta;
            p.m_norm = m_norm;
            p.distance = dist;
            ctx.emit(EventKind::InnerUpdate, t, k, std::move(p));
        }
        out.steps = k;
    }
    if (out.end != BlockEnd::BudgetExhausted && out.end != BlockEnd::OracleError) out.end = BlockEnd::Exhausted;
    out.momentum = std::move(m);
    out.m_norm = m_norm;
    return out;
}

}  // namespace

Schedule default_schedule(double epsilon, double delta, double lipschitz, double value_gap) {
    require_positive(epsilon, "epsilon");
    require_positive(delta, "delta");
    require_positive(lipschitz, "lipschitz");
    require_positive(value_gap, "value_gap");
    const double inner = 80.0 * lipschitz * lipschitz / (epsilon * epsilon);
    const double outer = 4.0 * value_gap / (epsilon * delta);
    return Schedule{noise_tolerant_ceil(inner, "K"), noise_tolerant_ceil(outer, "T")};
}

double oracle_budget(double epsilon, double delta, double lipschitz, double value_gap, double gamma) {
    require_positive(epsilon, "epsilon");
    require_positive(delta, "delta");
    require_positive(lipschitz, "lipschitz");
    require_positive(value_gap, "value_gap");
    if (!(gamma > 0.0 && gamma < 1.0)) throw std::invalid_argument("gamma must lie in (0, 1)");
    const double prefactor = 320.0 * value_gap * lipschitz * lipschitz / (epsilon * epsilon * epsilon * delta);
    return prefactor * std::log(4.0 * value_gap / (gamma * epsilon * delta));
}

double beta_coefficient(double m_norm, double lipschitz) {
    require_positive(lipschitz, "lipschitz");
    if (!(m_norm > 0.0) || m_norm > lipschitz) {
        throw std::domain_error("beta_coefficient: m_norm " + std::to_string(m_norm) + " outside (0, " +
                                std::to_string(lipschitz) + "]");
    }
    const double L = lipschitz;
    const double s = m_norm;
    const double L2 = L * L;
    const double L3 = L2 * L;
    return (8.0 * L3 - L2 * s - 4.0 * L * s * s) / (8.0 * L3 - L2 * s - s * s * s);
}

Vector trial_point(const Vector& x_t, const Vector& m, double delta, double lipschitz) {
    const double m_norm = norm(m);
    if (m_norm == 0.0) throw std::domain_error("trial_point: zero momentum");
    const double step = (1.0 - m_norm / (8.0 * lipschitz)) * delta / m_norm;
    return x_t - step * m;
}

bool descent_test(double f_trial, double f_current, double m_norm, double delta) {
    return f_trial - f_current < -(delta / 4.0) * m_norm;
}

Vector momentum_update(const Vector& m, const Vector& g, double beta) {
    if (!(beta >= 0.0 && beta <= 1.0)) throw std::domain_error("momentum_update: beta outside [0, 1]");
    if (m.dim() != g.dim()) throw DimensionError("momentum_update: dimension mismatch");
    Vector out(m.dim());
    for (std::size_t i = 0; i < m.dim(); ++i) out[i] = beta * m[i] + (1.0 - beta) * g[i];
    return out;
}

double momentum_bound_objective(double beta, double m_norm, double lipschitz) {
    const double L = lipschitz;
    const double s = m_norm;
    const double w = s * s / (1.0 - s / (8.0 * L));
    // beta^2 (L^2 + s^2 - w) + beta (w - 2L^2) + L^2, regrouped into
    // nonnegative terms to avoid cancellation at small s
    const double one_minus = 1.0 - beta;
    return L * L * one_minus * one_minus + beta * beta * s * s + beta * one_minus * w;
}

double contraction_constant(double m_norm, double lipschitz) {
    const double L = lipschitz;
    const double s = m_norm;
    const double L2 = L * L;
    const double num = 16.0 * L2 * L2 - 8.0 * L2 * L * s + L2 * s * s;
    const double den = 64.0 * L2 * L2 - 16.0 * L2 * L * s + L2 * s * s - 8.0 * L * s * s * s + s * s * s * s;
    return num / den;
}

std::string_view to_string(RunStatus status) {
    switch (status) {
        case RunStatus::Stationary: return "Stationary";
        case RunStatus::BudgetExhausted: return "BudgetExhausted";
        case RunStatus::OuterLimitReached: return "OuterLimitReached";
        case RunStatus::OracleError: return "OracleError";
        case RunStatus::RestartLimitReached: return "RestartLimitReached";
    }
    return "Unknown";
}

std::uint64_t RunResult::total_restarts() const {
    std::uint64_t acc = 0;
    for (auto r : restarts_per_outer) acc += r;
    return acc;
}

std::uint64_t RunResult::max_restarts() const {
    std::uint64_t best = 0;
    for (auto r : restarts_per_outer) best = std::max(best, r);
    return best;
}

std::pair<RunResult, Trace> run(const ProblemSpec& problem, const SolverParams& params,
                                std::optional<Schedule> schedule) {
    validate(params, problem);
    const auto clock_start = std::chrono::steady_clock::now();
    const Schedule sched =
        schedule ? *schedule : default_schedule(params.epsilon, params.delta, problem.lipschitz(), problem.value_gap());
    if (sched.inner == 0 || sched.outer == 0) throw std::invalid_argument("schedule: K and T must be positive");

    RunContext ctx(problem, params);
    RunResult result;
    Vector x = problem.initial_point();
    double f_x = 0.0;
    std::uint64_t t = 1;
    result.restarts_per_outer.push_back(0);

    auto finish = [&](RunStatus status, double m_norm) {
        result.status = status;
        result.final_point = x;
        result.final_value = f_x;
        result.final_momentum_norm = m_norm;
        result.oracle_calls = ctx.calls();
        result.outer_steps = t - 1;
        result.max_query_distance = ctx.max_query_distance;
        result.error_flags = ctx.error_flags();
        EventPayload p;
        p.point = x;
        p.value = f_x;
        p.m_norm = m_norm;
        p.note = std::string(to_string(status));
        ctx.emit(EventKind::Terminate, t, 0, std::move(p));
        result.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - clock_start).count();
        return std::pair{std::move(result), ctx.take_trace()};
    };

    double last_m_norm = 0.0;
    while (t <= sched.outer) {
        if (!ctx.budget_left()) return finish(RunStatus::BudgetExhausted, last_m_norm);
        const auto seed_response = ctx.query(x, t, 0, true);
        f_x = seed_response.value;
        if (!seed_response.differentiable()) {
            ctx.flag_error(x, t, 0, true);
            return finish(RunStatus::OracleError, last_m_norm);
        }
        auto block = inner_block(ctx, x, f_x, *seed_response.gradient, t, sched.inner, true);
        last_m_norm = block.m_norm;
        switch (block.end) {
            case BlockEnd::Terminated:
                return finish(RunStatus::Stationary, block.m_norm);
            case BlockEnd::OracleError:
                return finish(RunStatus::OracleError, block.m_norm);
            case BlockEnd::BudgetExhausted:
                return finish(RunStatus::BudgetExhausted, block.m_norm);
            case BlockEnd::Descent:
                result.min_descent_decrease = std::min(result.min_descent_decrease, f_x - block.accepted_value);
                x = std::move(block.accepted_point);
                f_x = block.accepted_value;
                ++t;
                if (t <= sched.outer) result.restarts_per_outer.push_back(0);
                break;
            case BlockEnd::Exhausted: {
                auto& restarts = result.restarts_per_outer.back();
                ++restarts;
                EventPayload p;
                p.m_norm = block.m_norm;
                p.note = "restart " + std::to_string(restarts);
                ctx.emit(EventKind::Restart, t, sched.inner, std::move(p));
                if (params.max_restarts_per_outer && restarts > *params.max_restarts_per_outer) {
                    return finish(RunStatus::RestartLimitReached, block.m_norm);
                }
                break;
            }
        }
    }
    return finish(RunStatus::OuterLimitReached, last_m_norm);
}

InnerEpisode inner_episode(const ProblemSpec& problem, const Vector& x_t, const SolverParams& params,
                           std::uint64_t inner_steps, bool stop_on_small_momentum) {
    validate(params, problem);
    RunContext ctx(problem, params);
    InnerEpisode episode;
    const auto seed_response = ctx.query(x_t, 1, 0, true);
    if (!seed_response.differentiable()) {
        ctx.flag_error(x_t, 1, 0, true);
        episode.end = EpisodeEnd::OracleError;
        episode.final_momentum = Vector(x_t.dim());
        episode.oracle_calls = ctx.calls();
        episode.error_flags = ctx.error_flags();
        return episode;
    }
    auto block = inner_block(ctx, x_t, seed_response.value, *seed_response.gradient, 1, inner_steps,
                             stop_on_small_momentum);
    episode.steps = block.steps;
    episode.oracle_calls = ctx.calls();
    episode.error_flags = ctx.error_flags();
    episode.max_query_distance = ctx.max_query_distance;
    switch (block.end) {
        case BlockEnd::Exhausted:
            episode.end = EpisodeEnd::Completed;
            episode.final_momentum = std::move(block.momentum);
            return episode;
        case BlockEnd::Descent: episode.end = EpisodeEnd::Descent; break;
        case BlockEnd::Terminated: episode.end = EpisodeEnd::Terminated; break;
        case BlockEnd::OracleError: episode.end = EpisodeEnd::OracleError; break;
        case BlockEnd::BudgetExhausted: episode.end = EpisodeEnd::BudgetExhausted; break;
    }
    // broken episodes carry m_{t,K} = 0
    episode.final_momentum = Vector(x_t.dim());
    return episode;
}

}  // namespace pingd
