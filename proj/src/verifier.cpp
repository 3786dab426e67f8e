#include "pingd/verifier.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "json.hpp"
#include "pingd/sampler.hpp"

namespace pingd {

GradientSample sample_goldstein_gradients(const Oracle& fn, const Vector& x, double delta, std::size_t n,
                                          RngStream& rng) {
    if (n == 0) throw std::invalid_argument("sample_goldstein_gradients: n must be >= 1");
    if (delta < 0.0) throw std::invalid_argument("sample_goldstein_gradients: delta must be >= 0");
    if (x.dim() != fn.dim()) throw DimensionError("sample_goldstein_gradients: dimension mismatch");
    GradientSample out;
    out.points.reserve(n);
    out.gradients.reserve(n);
    while (out.gradients.size() < n) {
        Vector y = sample_ball(x, delta, rng);
        auto response = fn.evaluate(y);
        if (!response.differentiable()) {
            if (++out.redraws > n) {
                throw std::runtime_error("sample_goldstein_gradients: more than n nondifferentiable hits around the "
                                         "point; the kink set of " + fn.id() + " looks fat");
            }
            continue;
        }
        out.points.push_back(std::move(y));
        out.gradients.push_back(std::move(*response.gradient));
    }
    return out;
}

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// Coefficients (summing to 1) of the minimum-norm point of aff{P[:, corral]}.
VectorXd affine_minimizer(const MatrixXd& P, const std::vector<std::size_t>& corral) {
    const std::size_t m = corral.size();
    VectorXd alpha(static_cast<Eigen::Index>(m));
    if (m == 1) {
        alpha(0) = 1.0;
        return alpha;
    }
    const VectorXd base = P.col(static_cast<Eigen::Index>(corral[0]));
    MatrixXd D(P.rows(), static_cast<Eigen::Index>(m - 1));
    for (std::size_t i = 1; i < m; ++i) {
        D.col(static_cast<Eigen::Index>(i - 1)) = P.col(static_cast<Eigen::Index>(corral[i])) - base;
    }
    const VectorXd c = D.completeOrthogonalDecomposition().solve(-base);
    alpha(0) = 1.0 - c.sum();
    alpha.tail(static_cast<Eigen::Index>(m - 1)) = c;
    return alpha;
}

}  // namespace

MinNormPoint min_norm_in_hull(std::span<const Vector> vectors, double tol) {
    if (vectors.empty()) throw std::invalid_argument("min_norm_in_hull: empty input");
    if (!(tol > 0.0)) throw std::invalid_argument("min_norm_in_hull: tol must be > 0");
    const std::size_t d = vectors.front().dim();
    const std::size_t n = vectors.size();
    MatrixXd P(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(n));
    double scale_sq = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        if (vectors[j].dim() != d) throw std::invalid_argument("min_norm_in_hull: vectors of different length");
        for (std::size_t i = 0; i < d; ++i) P(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = vectors[j][i];
        scale_sq = std::max(scale_sq, P.col(static_cast<Eigen::Index>(j)).squaredNorm());
    }

    // Wolfe's stopping tolerances, scaled by the largest squared norm
    const double gap_tol = std::max(tol * tol, 1e-14 * scale_sq);
    const double weight_tol = 1e-12;

    Eigen::Index start = 0;
    P.colwise().squaredNorm().minCoeff(&start);
    std::vector<std::size_t> corral{static_cast<std::size_t>(start)};
    std::vector<double> weights{1.0};
    VectorXd x = P.col(start);

    auto snapshot = [&](double gap, std::size_t iterations) {
        MinNormPoint out;
        out.coefficients.assign(n, 0.0);
        const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
        VectorXd combo = VectorXd::Zero(static_cast<Eigen::Index>(d));
        for (std::size_t i = 0; i < corral.size(); ++i) {
            const double w = weights[i] / total;
            out.coefficients[corral[i]] += w;
        }
        for (std::size_t j = 0; j < n; ++j) {
            if (out.coefficients[j] != 0.0) combo += out.coefficients[j] * P.col(static_cast<Eigen::Index>(j));
        }
        out.point = Vector(std::vector<double>(combo.data(), combo.data() + combo.size()));
        out.min_norm_value = norm(out.point);
        out.gap = gap;
        out.iterations = iterations;
        return out;
    };

    const std::size_t max_major = 100 * (n + d) + 100;
    double gap = std::numeric_limits<double>::infinity();
    for (std::size_t major = 0; major < max_major; ++major) {
        const VectorXd scores = P.transpose() * x;
        Eigen::Index j = 0;
        const double best = scores.minCoeff(&j);
        gap = x.squaredNorm() - best;
        if (gap <= gap_tol) return snapshot(gap, major);
        if (std::find(corral.begin(), corral.end(), static_cast<std::size_t>(j)) != corral.end()) {
            // no progress is possible from rounding-level directions
            return snapshot(gap, major);
        }
        corral.push_back(static_cast<std::size_t>(j));
        weights.push_back(0.0);

        for (std::size_t minor = 0; minor <= corral.size() + 1; ++minor) {
            const VectorXd alpha = affine_minimizer(P, corral);
            if ((alpha.array() > weight_tol).all()) {
                weights.assign(alpha.data(), alpha.data() + alpha.size());
                break;
            }
            // Move from the current weights toward alpha until a weight hits zero.
            double theta = 1.0;
            for (std::size_t i = 0; i < corral.size(); ++i) {
                const double a = alpha(static_cast<Eigen::Index>(i));
                if (a <= weight_tol) {
                    const double denom = weights[i] - a;
                    if (denom > 0.0) theta = std::min(theta, weights[i] / denom);
                }
            }
            for (std::size_t i = 0; i < corral.size(); ++i) {
                weights[i] = theta * alpha(static_cast<Eigen::Index>(i)) + (1.0 - theta) * weights[i];
            }
            // drop vanished weights, keep at least one point
            std::size_t keep = 0;
            for (std::size_t i = 0; i < corral.size(); ++i) {
                if (weights[i] > weight_tol) {
                    corral[keep] = corral[i];
                    weights[keep] = weights[i];
                    ++keep;
                }
            }
            if (keep == 0) {
                const auto it = std::max_element(weights.begin(), weights.end());
                const std::size_t idx = static_cast<std::size_t>(it - weights.begin());
                corral = {corral[idx]};
                weights = {1.0};
                break;
            }
            corral.resize(keep);
            weights.resize(keep);
        }
        const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
        x = VectorXd::Zero(static_cast<Eigen::Index>(d));
        for (std::size_t i = 0; i < corral.size(); ++i) {
            weights[i] /= total;
            x += weights[i] * P.col(static_cast<Eigen::Index>(corral[i]));
        }
    }
    throw MinNormError("min_norm_in_hull: iteration cap reached (gap " + std::to_string(gap) + ")",
                       snapshot(gap, max_major));
}

std::string_view to_string(Verdict verdict) {
    return verdict == Verdict::Certified ? "Certified" : "NotCertified";
}

Certificate certify(const Oracle& fn, const Vector& x, double epsilon, double delta, std::size_t n, RngStream& rng) {
    if (!(epsilon > 0.0)) throw std::invalid_argument("certify: epsilon must be > 0");
    Certificate cert;
    cert.point = x;
    cert.delta = delta;
    cert.epsilon = epsilon;
    cert.seed = rng.seed();
    cert.stream = rng.stream_id();
    auto sample = sample_goldstein_gradients(fn, x, delta, n, rng);
    const auto mnp = min_norm_in_hull(sample.gradients);
    cert.sample_points = std::move(sample.points);
    cert.gradients = std::move(sample.gradients);
    cert.coefficients = mnp.coefficients;
    cert.min_norm_value = mnp.min_norm_value;
    cert.verdict = mnp.min_norm_value <= epsilon ? Verdict::Certified : Verdict::NotCertified;
    return cert;
}

double recompute_min_norm(const Certificate& cert) {
    if (cert.gradients.empty() || cert.gradients.size() != cert.coefficients.size()) {
        throw std::invalid_argument("recompute_min_norm: malformed certificate");
    }
    Vector acc(cert.gradients.front().dim());
    for (std::size_t i = 0; i < cert.gradients.size(); ++i) acc += cert.coefficients[i] * cert.gradients[i];
    return norm(acc);
}

std::string to_json(const Certificate& cert, bool include_samples) {
    nlohmann::ordered_json j;
    j["point"] = cert.point.values();
    j["delta"] = cert.delta;
    j["epsilon"] = cert.epsilon;
    j["verdict"] = std::string(to_string(cert.verdict));
    j["min_norm_value"] = cert.min_norm_value;
    j["num_gradients"] = cert.gradients.size();
    j["seed"] = cert.seed;
    j["stream"] = cert.stream;
    if (include_samples) {
        auto& pts = j["sample_points"] = nlohmann::ordered_json::array();
        for (const auto& p : cert.sample_points) pts.push_back(p.values());
        auto& grads = j["gradients"] = nlohmann::ordered_json::array();
        for (const auto& g : cert.gradients) grads.push_back(g.values());
        j["coefficients"] = cert.coefficients;
    }
    return j.dump(2);
}

}  // namespace pingd
