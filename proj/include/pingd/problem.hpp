#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "pingd/oracle.hpp"
#include "pingd/vector.hpp"

namespace pingd {

/// An L-Lipschitz minimization problem: oracle, start point x_1 and an upper
/// bound Delta on f(x_1) - inf f. Construction fails if the oracle is not
/// differentiable at x_1.
class ProblemSpec {
public:
    static ProblemSpec create(std::shared_ptr<const Oracle> oracle, Vector initial_point, double lipschitz,
                              double value_gap);

    /// Uses the function's declared L and its infimum for Delta; both may be
    /// overridden. `start` defaults to the canonical start.
    static ProblemSpec from_function(const FunctionPtr& fn, std::optional<Vector> start = std::nullopt,
                                     std::optional<double> lipschitz = std::nullopt,
                                     std::optional<double> value_gap = std::nullopt);

    [[nodiscard]] const Oracle& oracle() const noexcept { return *oracle_; }
    [[nodiscard]] const std::shared_ptr<const Oracle>& oracle_ptr() const noexcept { return oracle_; }
    [[nodiscard]] std::string oracle_id() const { return oracle_->id(); }
    [[nodiscard]] std::size_t dim() const noexcept { return initial_point_.dim(); }
    [[nodiscard]] double lipschitz() const noexcept { return lipschitz_; }
    [[nodiscard]] const Vector& initial_point() const noexcept { return initial_point_; }
    [[nodiscard]] double value_gap() const noexcept { return value_gap_; }

private:
    ProblemSpec(std::shared_ptr<const Oracle> oracle, Vector x1, double lipschitz, double value_gap)
        : oracle_(std::move(oracle)), initial_point_(std::move(x1)), lipschitz_(lipschitz), value_gap_(value_gap) {}

    std::shared_ptr<const Oracle> oracle_;
    Vector initial_point_;
    double lipschitz_;
    double value_gap_;
};

enum class TraceLevel { Off, Summary, Full };

struct SolverParams {
    double epsilon = 0.1;
    double delta = 0.01;
    double gamma = 0.25;
    std::uint64_t seed = 0;
    std::uint64_t stream = 0;
    std::optional<std::uint64_t> max_oracle_calls;
    std::optional<std::uint64_t> max_restarts_per_outer;
    TraceLevel trace = TraceLevel::Off;
};

/// Throws std::invalid_argument on hard violations; returns warnings for
/// legal-but-suspicious settings (epsilon > L terminates trivially).
std::vector<std::string> validate(const SolverParams& params, const ProblemSpec& problem);

/// Suggested restart guard ceil(ln(1/gamma)/ln 16) + 8.
std::uint64_t suggested_restart_guard(double gamma);

}  // namespace pingd
