#include <cmath>
#include <random>

#include "doctest.h"
#include "json.hpp"
#include "pingd/oracle.hpp"
#include "pingd/verifier.hpp"
#include "support/reference.hpp"

using namespace pingd;

namespace {

void check_simplex(const MinNormPoint& r, const std::vector<Vector>& vs) {
    double sum = 0.0;
    Vector rebuilt(vs.front().dim());
    for (std::size_t i = 0; i < vs.size(); ++i) {
        CHECK(r.coefficients[i] >= 0.0);
        sum += r.coefficients[i];
        rebuilt += r.coefficients[i] * vs[i];
    }
    CHECK(std::abs(sum - 1.0) <= 1e-12);
    CHECK(distance(rebuilt, r.point) <= 1e-12);
    CHECK(std::abs(norm(r.point) - r.min_norm_value) <= 1e-12);
}

}  // namespace

TEST_CASE("min_norm_in_hull examples") {
    std::vector<Vector> sym{{1.0, 0.0}, {-1.0, 0.0}};
    auto r = min_norm_in_hull(sym);
    CHECK(r.min_norm_value <= 1e-12);
    CHECK(r.coefficients[0] == doctest::Approx(0.5));
    CHECK(r.coefficients[1] == doctest::Approx(0.5));

    std::vector<Vector> single{{0.3, -0.4}};
    r = min_norm_in_hull(single);
    CHECK(r.point == single[0]);
    CHECK(r.coefficients[0] == 1.0);

    std::vector<Vector> corner{{1.0, 0.0}, {0.0, 1.0}};
    r = min_norm_in_hull(corner);
    CHECK(r.point[0] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(r.point[1] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(r.min_norm_value == doctest::Approx(0.70710678).epsilon(1e-8));
    // grid reference for the same input
    CHECK(std::abs(r.min_norm_value - static_cast<double>(reference::hull_distance(corner))) < 1e-6);

    CHECK_THROWS_AS((void)min_norm_in_hull(std::vector<Vector>{}), std::invalid_argument);
    CHECK_THROWS_AS((void)min_norm_in_hull(std::vector<Vector>{{1.0}, {1.0, 2.0}}), std::invalid_argument);
}

TEST_CASE("min_norm_in_hull degenerate inputs") {
    std::vector<Vector> dup{{1.0, 1.0}, {1.0, 1.0}, {1.0, 1.0}};
    auto r = min_norm_in_hull(dup);
    CHECK(r.min_norm_value == doctest::Approx(std::sqrt(2.0)));
    check_simplex(r, dup);

    std::vector<Vector> collinear{{1.0, 2.0}, {2.0, 4.0}, {3.0, 6.0}};
    r = min_norm_in_hull(collinear);
    CHECK(r.min_norm_value == doctest::Approx(std::sqrt(5.0)));
    check_simplex(r, collinear);

    std::vector<Vector> through_origin{{-1.0, -1.0}, {2.0, 2.0}, {2.0, 2.0}};
    r = min_norm_in_hull(through_origin);
    CHECK(r.min_norm_value <= 1e-12);
    check_simplex(r, through_origin);

    std::vector<Vector> zeros{{0.0, 0.0}, {0.0, 0.0}};
    CHECK(min_norm_in_hull(zeros).min_norm_value == 0.0);
}

TEST_CASE("min_norm_in_hull on many points") {
    std::mt19937_64 gen(5);
    std::normal_distribution<double> n01;
    for (std::size_t d : {2u, 5u, 12u}) {
        for (int trial = 0; trial < 30; ++trial) {
            std::vector<Vector> vs;
            const double shift = trial % 2 ? 2.0 : 0.0;  // half the sets miss the origin
            for (int i = 0; i < 200; ++i) {
                Vector v(d);
                for (std::size_t j = 0; j < d; ++j) v[j] = n01(gen);
                v[0] += shift;
                vs.push_back(v);
            }
            const auto r = min_norm_in_hull(vs);
            check_simplex(r, vs);
            // optimality: <x, p_i> >= ||x||^2 - gap for every input
            for (const auto& v : vs) CHECK(dot(r.point, v) >= dot(r.point, r.point) - 1e-9);
        }
    }
}

TEST_CASE("min_norm_in_hull is monotone under adding vectors") {
    std::mt19937_64 gen(8);
    std::normal_distribution<double> n01;
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<Vector> vs;
        double previous = INFINITY;
        for (int i = 0; i < 12; ++i) {
            vs.push_back(Vector{n01(gen) + 1.0, n01(gen), n01(gen)});
            const double value = min_norm_in_hull(vs).min_norm_value;
            CHECK(value <= previous + 1e-12);
            previous = value;
        }
    }
}

TEST_CASE("sample_goldstein_gradients") {
    RngStream rng(1, 0);
    const auto abs = make_abs1d();
    const auto sample = sample_goldstein_gradients(*abs, Vector{0.0}, 0.5, 100, rng);
    REQUIRE(sample.gradients.size() == 100);
    bool plus = false, minus = false;
    for (std::size_t i = 0; i < sample.gradients.size(); ++i) {
        const double g = sample.gradients[i][0];
        CHECK((g == 1.0 || g == -1.0));
        plus |= g == 1.0;
        minus |= g == -1.0;
        CHECK(std::abs(sample.points[i][0]) <= 0.5);
    }
    CHECK(plus);
    CHECK(minus);

    // delta = 0 collapses onto x
    const auto same = sample_goldstein_gradients(*abs, Vector{2.0}, 0.0, 5, rng);
    for (const auto& p : same.points) CHECK(p == Vector{2.0});
    CHECK_THROWS_AS((void)sample_goldstein_gradients(*abs, Vector{0.0}, 0.0, 5, rng), std::runtime_error);
    CHECK_THROWS_AS((void)sample_goldstein_gradients(*abs, Vector{0.0}, 0.5, 0, rng), std::invalid_argument);
}

TEST_CASE("euclid gradients around the origin are uniform directions") {
    RngStream rng(2, 0);
    const auto fn = make_euclid(3);
    const auto sample = sample_goldstein_gradients(*fn, Vector{0.0, 0.0, 0.0}, 1.0, 10000, rng);
    Vector mean(3);
    std::vector<double> first;
    for (const auto& g : sample.gradients) {
        CHECK(norm(g) == doctest::Approx(1.0).epsilon(1e-12));
        mean += (1.0 / 10000.0) * g;
        first.push_back(g[0]);
    }
    CHECK(norm(mean) < 4.0 * std::sqrt(3.0) / 100.0);
    // first coordinate of a uniform direction on S^2 is Unif[-1, 1]
    const double D = reference::ks_statistic(first, [](double x) { return (x + 1.0) / 2.0; });
    CHECK(reference::ks_pvalue(D, first.size()) > 0.01);
}

TEST_CASE("certify examples") {
    const auto abs = make_abs1d();
    RngStream rng(3, 0);
    auto cert = certify(*abs, Vector{0.002}, 0.1, 0.01, 200, rng);
    CHECK(cert.verdict == Verdict::Certified);
    CHECK(reference::goldstein_interval_distance(*abs, 0.002, 0.01) == 0.0);
    CHECK(recompute_min_norm(cert) <= 0.1 + 1e-9);

    cert = certify(*abs, Vector{5.0}, 0.1, 0.01, 200, rng);
    CHECK(cert.verdict == Verdict::NotCertified);
    CHECK(cert.min_norm_value == doctest::Approx(1.0));
    CHECK(reference::goldstein_interval_distance(*abs, 5.0, 0.01) == 1.0);

    const auto euclid = make_euclid(3);
    cert = certify(*euclid, Vector{0.0, 0.0, 0.0}, 0.1, 0.05, 500, rng);
    CHECK(cert.verdict == Verdict::Certified);
    CHECK(cert.min_norm_value <= 0.1);
    for (const auto& p : cert.sample_points) CHECK(norm(p) <= 0.05 * (1 + 1e-12));
}

TEST_CASE("certificate soundness on random points") {
    RngStream rng(4, 0);
    std::mt19937_64 gen(4);
    std::uniform_real_distribution<double> u(-0.2, 0.2);
    for (const auto& fn : corpus(3)) {
        for (int i = 0; i < 20; ++i) {
            Vector x(fn->dim());
            for (std::size_t j = 0; j < fn->dim(); ++j) x[j] = u(gen);
            const auto cert = certify(*fn, x, 0.3, 0.1, 100, rng);
            if (cert.verdict == Verdict::Certified) CHECK(recompute_min_norm(cert) <= cert.epsilon + 1e-9);
            CHECK((cert.verdict == Verdict::Certified) == (cert.min_norm_value <= cert.epsilon));
            CHECK(std::abs(recompute_min_norm(cert) - cert.min_norm_value) <= 1e-9);
            for (const auto& p : cert.sample_points) CHECK(distance(p, x) <= 0.1 * (1 + 1e-12));
        }
    }
}

TEST_CASE("certificate JSON") {
    RngStream rng(3, 0);
    const auto cert = certify(*make_abs1d(), Vector{0.002}, 0.1, 0.01, 10, rng);
    const auto j = nlohmann::json::parse(to_json(cert));
    CHECK(j["verdict"] == "Certified");
    CHECK(j["gradients"].size() == 10);
    CHECK(j["coefficients"].size() == 10);
    CHECK(j["point"][0] == 0.002);
    const auto brief = nlohmann::json::parse(to_json(cert, false));
    CHECK_FALSE(brief.contains("gradients"));
}
