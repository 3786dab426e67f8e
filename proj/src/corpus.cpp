#include <algorithm>
#include <cmath>
#include <string>

#include "pingd/oracle.hpp"

namespace pingd {

namespace {

double sign(double v) { return v > 0.0 ? 1.0 : -1.0; }

class Abs1d final : public TestFunction {
public:
    Abs1d()
        : TestFunction({"abs1d", 1, 1.0, "x == 0", Vector{1.0}, Box{-10.0, 10.0}, 0.0}) {}

protected:
    double value_at(const Vector& x) const override { return std::abs(x[0]); }
    std::optional<Vector> gradient_at(const Vector& x) const override {
        if (x[0] == 0.0) return std::nullopt;
        return Vector{sign(x[0])};
    }
};

class L1Norm final : public TestFunction {
public:
    explicit L1Norm(std::size_t dim)
        : TestFunction({"l1norm", dim, std::sqrt(static_cast<double>(dim)), "any x_i == 0", Vector(dim, 1.0),
                        Box{-10.0, 10.0}, 0.0}) {}

protected:
    double value_at(const Vector& x) const override {
        double acc = 0.0;
        for (double c : x.coords()) acc += std::abs(c);
        return acc;
    }
    std::optional<Vector> gradient_at(const Vector& x) const override {
        Vector g(x.dim());
        for (std::size_t i = 0; i < x.dim(); ++i) {
            if (x[i] == 0.0) return std::nullopt;
            g[i] = sign(x[i]);
        }
        return g;
    }
};

Vector euclid_start(std::size_t dim) {
    // norm 10 along the diagonal
    return Vector(dim, 10.0 / std::sqrt(static_cast<double>(dim)));
}

class Euclid final : public TestFunction {
public:
    explicit Euclid(std::size_t dim)
        : TestFunction({"euclid", dim, 1.0, "x == 0 (origin only)", euclid_start(dim), Box{-10.0, 10.0}, 0.0}) {}

protected:
    double value_at(const Vector& x) const override { return norm(x); }
    std::optional<Vector> gradient_at(const Vector& x) const override {
        const double n = norm(x);
        if (n == 0.0) return std::nullopt;
        return (1.0 / n) * x;
    }
};

double max_slope_norm(const std::vector<LinearPiece>& pieces) {
    double best = 0.0;
    for (const auto& p : pieces) best = std::max(best, norm(p.slope));
    return best;
}

Vector maxlin_default_start(std::size_t dim) {
    Vector start(dim);
    for (std::size_t i = 0; i < dim; ++i) start[i] = 1.0 / static_cast<double>(i + 1);
    return start;
}

class MaxLin final : public TestFunction {
public:
    MaxLin(std::vector<LinearPiece> pieces, Vector start, double infimum)
        : TestFunction({"maxlin", start.dim(), max_slope_norm(pieces),
                        "argmax tie between pieces with distinct slopes", std::move(start), Box{-10.0, 10.0},
                        infimum}),
          pieces_(std::move(pieces)) {}

protected:
    double value_at(const Vector& x) const override {
        double best = -std::numeric_limits<double>::infinity();
        for (const auto& p : pieces_) best = std::max(best, dot(p.slope, x) + p.offset);
        return best;
    }
    std::optional<Vector> gradient_at(const Vector& x) const override {
        const LinearPiece* winner = nullptr;
        double best = -std::numeric_limits<double>::infinity();
        bool tie = false;
        for (const auto& p : pieces_) {
            const double v = dot(p.slope, x) + p.offset;
            if (v > best) {
                best = v;
                winner = &p;
                tie = false;
            } else if (v == best && p.slope != winner->slope) {
                tie = true;
            }
        }
        if (tie) return std::nullopt;
        return winner->slope;
    }

private:
    std::vector<LinearPiece> pieces_;
};

Vector chebrosen_start(std::size_t dim) {
    Vector start(dim, 0.5);
    start[0] = -0.5;
    return start;
}

class ChebRosen final : public TestFunction {
public:
    explicit ChebRosen(std::size_t dim)
        : TestFunction({"chebrosen", dim, lipschitz_bound(dim),
                        "x_1 == 1, or x_i == 0 for i < d, or x_{i+1} - 2|x_i| + 1 == 0", chebrosen_start(dim),
                        Box{-2.0, 2.0}, 0.0}) {}

    // |g_1| <= 1/4 + 2, |g_i| <= 1 + 2 for 1 < i < d, |g_d| <= 1
    static double lipschitz_bound(std::size_t dim) {
        if (dim < 2) throw std::invalid_argument("chebrosen requires dim >= 2");
        const double middle = static_cast<double>(dim - 2);
        return std::sqrt(2.25 * 2.25 + 9.0 * middle + 1.0);
    }

protected:
    double value_at(const Vector& x) const override {
        double acc = 0.25 * std::abs(x[0] - 1.0);
        for (std::size_t i = 0; i + 1 < x.dim(); ++i) acc += std::abs(x[i + 1] - 2.0 * std::abs(x[i]) + 1.0);
        return acc;
    }
    std::optional<Vector> gradient_at(const Vector& x) const override {
        if (x[0] == 1.0) return std::nullopt;
        Vector g(x.dim());
        g[0] = 0.25 * sign(x[0] - 1.0);
        for (std::size_t i = 0; i + 1 < x.dim(); ++i) {
            const double r = x[i + 1] - 2.0 * std::abs(x[i]) + 1.0;
            if (x[i] == 0.0 || r == 0.0) return std::nullopt;
            const double s = sign(r);
            g[i + 1] += s;
            g[i] += -2.0 * sign(x[i]) * s;
        }
        return g;
    }
};

std::vector<LinearPiece> infinity_norm_pieces(std::size_t dim) {
    std::vector<LinearPiece> pieces;
    for (std::size_t j = 0; j < dim; ++j) {
        Vector e(dim);
        e[j] = 1.0;
        pieces.push_back({e, 0.0});
        pieces.push_back({-1.0 * e, 0.0});
    }
    return pieces;
}

}  // namespace

FunctionPtr make_abs1d() { return std::make_shared<Abs1d>(); }

FunctionPtr make_l1norm(std::size_t dim) { return std::make_shared<L1Norm>(dim); }

FunctionPtr make_euclid(std::size_t dim) { return std::make_shared<Euclid>(dim); }

FunctionPtr make_maxlin(std::vector<LinearPiece> pieces, std::optional<Vector> start, double infimum) {
    if (pieces.empty()) throw std::invalid_argument("maxlin: at least one piece required");
    const std::size_t dim = pieces.front().slope.dim();
    for (const auto& p : pieces) {
        if (p.slope.dim() != dim) throw std::invalid_argument("maxlin: pieces have inconsistent dimension");
    }
    Vector x0 = start ? *start : maxlin_default_start(dim);
    return std::make_shared<MaxLin>(std::move(pieces), std::move(x0), infimum);
}

FunctionPtr make_maxlin(std::size_t dim) { return make_maxlin(infinity_norm_pieces(dim)); }

FunctionPtr make_chebrosen(std::size_t dim) { return std::make_shared<ChebRosen>(dim); }

std::vector<std::string> corpus_ids() { return {"abs1d", "l1norm", "euclid", "maxlin", "chebrosen"}; }

FunctionPtr make_function(std::string_view id, std::size_t dim) {
    if (dim == 0) throw std::invalid_argument("dimension must be >= 1");
    if (id == "abs1d") {
        if (dim != 1) throw std::invalid_argument("abs1d is one-dimensional");
        return make_abs1d();
    }
    if (id == "l1norm") return make_l1norm(dim);
    if (id == "euclid") return make_euclid(dim);
    if (id == "maxlin") return make_maxlin(dim);
    if (id == "chebrosen") return make_chebrosen(dim);
    throw std::invalid_argument("unknown function id '" + std::string(id) + "'");
}

std::vector<FunctionPtr> corpus(std::size_t dim) {
    std::vector<FunctionPtr> out{make_abs1d(), make_l1norm(dim), make_euclid(dim), make_maxlin(dim)};
    if (dim >= 2) out.push_back(make_chebrosen(dim));
    return out;
}

}  // namespace pingd
