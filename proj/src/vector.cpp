#include "pingd/vector.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace pingd {

namespace {

void require_same_dim(const Vector& a, const Vector& b, const char* op) {
    if (a.dim() != b.dim()) {
        throw std::invalid_argument(std::string(op) + ": dimension mismatch (" +
                                    std::to_string(a.dim()) + " vs " + std::to_string(b.dim()) + ")");
    }
}

}  // namespace

Vector::Vector(std::size_t dim, double fill) : coords_(dim, fill) {}

Vector::Vector(std::initializer_list<double> coords) : coords_(coords) {}

Vector::Vector(std::vector<double> coords) : coords_(std::move(coords)) {}

bool Vector::is_finite() const noexcept {
    return std::all_of(coords_.begin(), coords_.end(), [](double c) { return std::isfinite(c); });
}

Vector Vector::head(std::size_t n) const {
    if (n > coords_.size()) {
        throw std::out_of_range("Vector::head: n exceeds dimension");
    }
    return Vector(std::vector<double>(coords_.begin(), coords_.begin() + static_cast<std::ptrdiff_t>(n)));
}

Vector& Vector::operator+=(const Vector& rhs) {
    require_same_dim(*this, rhs, "operator+=");
    for (std::size_t i = 0; i < coords_.size(); ++i) coords_[i] += rhs.coords_[i];
    return *this;
}

Vector& Vector::operator-=(const Vector& rhs) {
    require_same_dim(*this, rhs, "operator-=");
    for (std::size_t i = 0; i < coords_.size(); ++i) coords_[i] -= rhs.coords_[i];
    return *this;
}

Vector& Vector::operator*=(double s) {
    for (auto& c : coords_) c *= s;
    return *this;
}

Vector operator+(Vector lhs, const Vector& rhs) { return lhs += rhs; }
Vector operator-(Vector lhs, const Vector& rhs) { return lhs -= rhs; }
Vector operator*(double s, Vector v) { return v *= s; }
Vector operator*(Vector v, double s) { return v *= s; }

double dot(const Vector& a, const Vector& b) {
    require_same_dim(a, b, "dot");
    double acc = 0.0;
    for (std::size_t i = 0; i < a.dim(); ++i) acc += a[i] * b[i];
    return acc;
}

double norm(const Vector& v) {
    // scaled accumulation; avoids overflow for large entries
    double scale = 0.0;
    for (double c : v.coords()) scale = std::max(scale, std::abs(c));
    if (scale == 0.0) return 0.0;
    double acc = 0.0;
    for (double c : v.coords()) {
        const double r = c / scale;
        acc += r * r;
    }
    return scale * std::sqrt(acc);
}

double distance(const Vector& a, const Vector& b) { return norm(a - b); }

}  // namespace pingd
