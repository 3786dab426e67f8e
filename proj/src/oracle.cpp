#include "pingd/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace pingd {

bool Box::contains(const Vector& x) const noexcept {
    return std::all_of(x.coords().begin(), x.coords().end(),
                       [this](double c) { return c >= lower && c <= upper; });
}

TestFunction::TestFunction(Info info) : info_(std::move(info)) {
    if (info_.dim == 0) throw std::invalid_argument("TestFunction: dim must be >= 1");
    if (!(info_.lipschitz > 0.0)) throw std::invalid_argument("TestFunction: lipschitz must be > 0");
    if (info_.canonical_start.dim() != info_.dim) {
        throw std::invalid_argument("TestFunction: canonical start has wrong dimension");
    }
}

double TestFunction::known_value_gap() const { return value_at(info_.canonical_start) - info_.infimum; }

OracleResponse TestFunction::evaluate(const Vector& x) const {
    if (x.dim() != info_.dim) {
        throw DimensionError(info_.id + ": expected dimension " + std::to_string(info_.dim) + ", got " +
                             std::to_string(x.dim()));
    }
    if (!x.is_finite()) throw DimensionError(info_.id + ": non-finite query point");
    return OracleResponse{value_at(x), gradient_at(x)};
}

double check_gradient(const Oracle& fn, const Vector& x, double h) {
    if (!(h > 0.0)) throw std::invalid_argument("check_gradient: h must be > 0");
    const auto center = fn.evaluate(x);
    if (!center.differentiable()) {
        throw NotDifferentiableError("check_gradient: " + fn.id() + " is not differentiable at the query point");
    }
    double worst = 0.0;
    for (std::size_t i = 0; i < x.dim(); ++i) {
        Vector up = x;
        Vector down = x;
        up[i] += h;
        down[i] -= h;
        const double fd = (fn.evaluate(up).value - fn.evaluate(down).value) / (2.0 * h);
        worst = std::max(worst, std::abs(fd - (*center.gradient)[i]));
    }
    return worst;
}

}  // namespace pingd
