#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "pingd/oracle.hpp"
#include "pingd/sampler.hpp"
#include "pingd/vector.hpp"

namespace pingd {

struct GradientSample {
    std::vector<Vector> points;     // differentiable points within delta of the center
    std::vector<Vector> gradients;  // gradients[i] = grad f(points[i])
    std::uint64_t redraws = 0;      // nondifferentiable hits that were skipped
};

/// Draws n points uniformly from the closed delta-ball around x and returns
/// their gradients. Nondifferentiable hits are redrawn; more than n redraws
/// throws std::runtime_error.
GradientSample sample_goldstein_gradients(const Oracle& fn, const Vector& x, double delta, std::size_t n,
                                          RngStream& rng);

struct MinNormPoint {
    Vector point;
    std::vector<double> coefficients;  // one per input vector, on the simplex
    double min_norm_value = 0.0;
    double gap = 0.0;  // Frank-Wolfe gap <x, x - p_j> at exit
    std::size_t iterations = 0;
};

class MinNormError : public std::runtime_error {
public:
    MinNormError(const std::string& what, MinNormPoint best)
        : std::runtime_error(what), best_(std::move(best)) {}
    [[nodiscard]] const MinNormPoint& best() const noexcept { return best_; }

private:
    MinNormPoint best_;
};

/// Minimum-norm point of the convex hull of `vectors` (Wolfe's algorithm).
/// Throws std::invalid_argument on empty or ragged input and MinNormError if
/// the iteration cap is hit.
MinNormPoint min_norm_in_hull(std::span<const Vector> vectors, double tol = 1e-9);

enum class Verdict { Certified, NotCertified };

std::string_view to_string(Verdict verdict);

/// One-sided stationarity certificate. Certified means the sampled gradients,
/// all taken at differentiable points of the delta-ball, have a convex
/// combination of norm <= epsilon, which proves (epsilon, delta)-stationarity
/// up to rounding. NotCertified only reports that sampling found no such
/// combination; it does not disprove stationarity.
struct Certificate {
    Vector point;
    double delta = 0.0;
    double epsilon = 0.0;
    std::vector<Vector> sample_points;
    std::vector<Vector> gradients;
    std::vector<double> coefficients;
    double min_norm_value = 0.0;
    Verdict verdict = Verdict::NotCertified;
    std::uint64_t seed = 0;
    std::uint64_t stream = 0;
};

Certificate certify(const Oracle& fn, const Vector& x, double epsilon, double delta, std::size_t n, RngStream& rng);

/// ||sum_i lambda_i g_i|| recomputed from the stored gradients and weights.
double recompute_min_norm(const Certificate& cert);

/// JSON document with the certificate fields; vectors are arrays of numbers.
/// `include_samples` controls the (large) points/gradients arrays.
std::string to_json(const Certificate& cert, bool include_samples = true);

}  // namespace pingd
