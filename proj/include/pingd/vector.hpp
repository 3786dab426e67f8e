#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace pingd {

/// Dense point/gradient in R^d. Entries are required to be finite.
class Vector {
public:
    Vector() = default;
    explicit Vector(std::size_t dim, double fill = 0.0);
    Vector(std::initializer_list<double> coords);
    explicit Vector(std::vector<double> coords);

    [[nodiscard]] std::size_t dim() const noexcept { return coords_.size(); }
    [[nodiscard]] double operator[](std::size_t i) const { return coords_[i]; }
    double& operator[](std::size_t i) { return coords_[i]; }

    [[nodiscard]] std::span<const double> coords() const noexcept { return coords_; }
    [[nodiscard]] const std::vector<double>& values() const noexcept { return coords_; }

    [[nodiscard]] bool is_finite() const noexcept;
    /// First `n` coordinates.
    [[nodiscard]] Vector head(std::size_t n) const;

    Vector& operator+=(const Vector& rhs);
    Vector& operator-=(const Vector& rhs);
    Vector& operator*=(double s);

    friend bool operator==(const Vector&, const Vector&) = default;

private:
    std::vector<double> coords_;
};

Vector operator+(Vector lhs, const Vector& rhs);
Vector operator-(Vector lhs, const Vector& rhs);
Vector operator*(double s, Vector v);
Vector operator*(Vector v, double s);

double dot(const Vector& a, const Vector& b);
/// Euclidean length.
double norm(const Vector& v);
double distance(const Vector& a, const Vector& b);

}  // namespace pingd
