#pragma once

#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "pingd/vector.hpp"

namespace pingd {

class DimensionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class NotDifferentiableError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Result of one oracle query. The gradient is present iff f is
/// differentiable at the query point; otherwise the caller must treat the
/// query as `error = 1`.
struct OracleResponse {
    double value = 0.0;
    std::optional<Vector> gradient;

    [[nodiscard]] bool differentiable() const noexcept { return gradient.has_value(); }
};

/// First-order oracle that only reports gradients at points of
/// differentiability. Implementations must be read-only after construction
/// so one instance can be shared by concurrent runs.
class Oracle {
public:
    virtual ~Oracle() = default;

    [[nodiscard]] virtual std::string id() const = 0;
    [[nodiscard]] virtual std::size_t dim() const = 0;
    [[nodiscard]] virtual double lipschitz() const = 0;

    /// Throws DimensionError on a length mismatch or non-finite input.
    [[nodiscard]] virtual OracleResponse evaluate(const Vector& x) const = 0;
};

/// Axis-aligned box [lower, upper]^d on which a test function's Lipschitz
/// constant is declared.
struct Box {
    double lower = -10.0;
    double upper = 10.0;

    [[nodiscard]] bool contains(const Vector& x) const noexcept;
};

/// Built-in test function: exact values, exact gradients, and an exact
/// membership test for its nondifferentiability set.
class TestFunction : public Oracle {
public:
    struct Info {
        std::string id;
        std::size_t dim = 1;
        double lipschitz = 1.0;
        std::string kink_description;
        Vector canonical_start;
        Box domain;
        double infimum = 0.0;
    };

    explicit TestFunction(Info info);

    [[nodiscard]] std::string id() const override { return info_.id; }
    [[nodiscard]] std::size_t dim() const override { return info_.dim; }
    [[nodiscard]] double lipschitz() const override { return info_.lipschitz; }
    [[nodiscard]] const std::string& kink_description() const noexcept { return info_.kink_description; }
    [[nodiscard]] const Vector& canonical_start() const noexcept { return info_.canonical_start; }
    [[nodiscard]] const Box& domain() const noexcept { return info_.domain; }
    [[nodiscard]] double infimum() const noexcept { return info_.infimum; }
    /// f(canonical_start) - inf f.
    [[nodiscard]] double known_value_gap() const;

    [[nodiscard]] OracleResponse evaluate(const Vector& x) const final;

protected:
    [[nodiscard]] virtual double value_at(const Vector& x) const = 0;
    /// nullopt exactly on the kink set.
    [[nodiscard]] virtual std::optional<Vector> gradient_at(const Vector& x) const = 0;

private:
    Info info_;
};

using FunctionPtr = std::shared_ptr<const TestFunction>;

/// Affine piece a^T x + b of a max-of-linear function.
struct LinearPiece {
    Vector slope;
    double offset = 0.0;
};

[[nodiscard]] FunctionPtr make_abs1d();
[[nodiscard]] FunctionPtr make_l1norm(std::size_t dim);
[[nodiscard]] FunctionPtr make_euclid(std::size_t dim);
/// max_i (a_i^T x + b_i). Kinks are exact argmax ties between pieces with
/// distinct slopes. `infimum` is not derived from the pieces; pass it when
/// the default 0 is wrong.
[[nodiscard]] FunctionPtr make_maxlin(std::vector<LinearPiece> pieces, std::optional<Vector> start = std::nullopt,
                                      double infimum = 0.0);
/// Default maxlin: pieces +-e_j, i.e. the infinity norm.
[[nodiscard]] FunctionPtr make_maxlin(std::size_t dim);
/// 1/4|x_1 - 1| + sum_i |x_{i+1} - 2|x_i| + 1| on the box [-2, 2]^d, d >= 2.
[[nodiscard]] FunctionPtr make_chebrosen(std::size_t dim);

/// Look up a corpus function by id. Throws std::invalid_argument for an
/// unknown id or an unsupported dimension.
[[nodiscard]] FunctionPtr make_function(std::string_view id, std::size_t dim);

[[nodiscard]] std::vector<std::string> corpus_ids();

/// Every corpus function at dimension `dim` (abs1d is always 1-d;
/// chebrosen is skipped when dim < 2).
[[nodiscard]] std::vector<FunctionPtr> corpus(std::size_t dim = 2);

/// Max over coordinates of |central difference - analytic gradient|.
/// Throws NotDifferentiableError when x is on the kink set.
[[nodiscard]] double check_gradient(const Oracle& fn, const Vector& x, double h);

}  // namespace pingd
