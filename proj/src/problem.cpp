#include "pingd/problem.hpp"

#include <cmath>
#include <stdexcept>

namespace pingd {

ProblemSpec ProblemSpec::create(std::shared_ptr<const Oracle> oracle, Vector initial_point, double lipschitz,
                                double value_gap) {
    if (!oracle) throw std::invalid_argument("ProblemSpec: null oracle");
    if (initial_point.dim() == 0) throw std::invalid_argument("ProblemSpec: dimension must be >= 1");
    if (!(lipschitz > 0.0) || !std::isfinite(lipschitz)) {
        throw std::invalid_argument("ProblemSpec: lipschitz must be a positive finite number");
    }
    if (!(value_gap > 0.0) || !std::isfinite(value_gap)) {
        throw std::invalid_argument("ProblemSpec: value_gap must be a positive finite number");
    }
    const auto response = oracle->evaluate(initial_point);  // checks dimension and finiteness
    if (!response.differentiable()) {
        throw std::invalid_argument("ProblemSpec: " + oracle->id() + " is not differentiable at the initial point");
    }
    return ProblemSpec(std::move(oracle), std::move(initial_point), lipschitz, value_gap);
}

ProblemSpec ProblemSpec::from_function(const FunctionPtr& fn, std::optional<Vector> start,
                                       std::optional<double> lipschitz, std::optional<double> value_gap) {
    if (!fn) throw std::invalid_argument("ProblemSpec: null function");
    Vector x1 = start ? std::move(*start) : fn->canonical_start();
    if (x1.dim() != fn->dim()) {
        throw DimensionError("ProblemSpec: start point has dimension " + std::to_string(x1.dim()) + ", " +
                             fn->id() + " expects " + std::to_string(fn->dim()));
    }
    const double gap = value_gap ? *value_gap : fn->evaluate(x1).value - fn->infimum();
    return create(fn, std::move(x1), lipschitz.value_or(fn->lipschitz()), gap);
}

std::vector<std::string> validate(const SolverParams& params, const ProblemSpec& problem) {
    if (!(params.epsilon > 0.0) || !std::isfinite(params.epsilon)) {
        throw std::invalid_argument("epsilon must be a positive finite number");
    }
    if (!(params.delta > 0.0) || !std::isfinite(params.delta)) {
        throw std::invalid_argument("delta must be a positive finite number");
    }
    if (!(params.gamma > 0.0 && params.gamma < 1.0)) throw std::invalid_argument("gamma must lie in (0, 1)");
    if (params.max_oracle_calls && *params.max_oracle_calls == 0) {
        throw std::invalid_argument("max_oracle_calls must be positive when set");
    }
    if (params.max_restarts_per_outer && *params.max_restarts_per_outer == 0) {
        throw std::invalid_argument("max_restarts_per_outer must be positive when set");
    }
    std::vector<std::string> warnings;
    if (params.epsilon > problem.lipschitz()) {
        warnings.emplace_back("epsilon exceeds the Lipschitz constant; the first gradient terminates the run");
    }
    return warnings;
}

std::uint64_t suggested_restart_guard(double gamma) {
    if (!(gamma > 0.0 && gamma < 1.0)) throw std::invalid_argument("gamma must lie in (0, 1)");
    return static_cast<std::uint64_t>(std::ceil(std::log(1.0 / gamma) / std::log(16.0))) + 8;
}

}  // namespace pingd
