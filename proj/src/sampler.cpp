#include "pingd/sampler.hpp"

#include <cmath>
#include <stdexcept>

namespace pingd {

namespace {

constexpr int kMaxSphereRetries = 64;

std::mt19937_64 seeded_engine(std::uint64_t seed, std::uint64_t stream_id) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream_id), static_cast<std::uint32_t>(stream_id >> 32)};
    return std::mt19937_64(seq);
}

}  // namespace

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream_id)
    : seed_(seed), stream_id_(stream_id), engine_(seeded_engine(seed, stream_id)) {}

double RngStream::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

double RngStream::normal() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_normal_;
    }
    double u = 0.0;
    double v = 0.0;
    double s = 0.0;
    do {
        u = 2.0 * uniform() - 1.0;
        v = 2.0 * uniform() - 1.0;
        s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double scale = std::sqrt(-2.0 * std::log(s) / s);
    spare_normal_ = v * scale;
    has_spare_ = true;
    return u * scale;
}

Vector sample_sphere(std::size_t n, RngStream& rng) {
    if (n < 2) throw std::invalid_argument("sample_sphere: dimension must be >= 2");
    for (int attempt = 0; attempt < kMaxSphereRetries; ++attempt) {
        Vector g(n);
        for (std::size_t i = 0; i < n; ++i) g[i] = rng.normal();
        const double len = norm(g);
        if (len > 0.0) return (1.0 / len) * std::move(g);
    }
    throw std::runtime_error("sample_sphere: degenerate Gaussian draws exhausted the retry budget");
}

Vector conic_component(const Vector& v, const Vector& axis) {
    if (v.dim() != axis.dim()) throw std::invalid_argument("conic_component: dimension mismatch");
    const double axis_sq = dot(axis, axis);
    if (axis_sq == 0.0) throw std::invalid_argument("conic_component: zero axis");
    if (v.dim() == 1) return Vector(1);  // trivial orthogonal complement
    Vector b = v - (dot(v, axis) / axis_sq) * axis;
    // one re-orthogonalization pass keeps b^T axis at rounding level
    b -= (dot(b, axis) / axis_sq) * axis;
    return b;
}

Vector lerp(const Vector& a, const Vector& b, double lambda) {
    if (a.dim() != b.dim()) throw std::invalid_argument("lerp: dimension mismatch");
    Vector y(a.dim());
    for (std::size_t i = 0; i < a.dim(); ++i) y[i] = a[i] + lambda * (b[i] - a[i]);
    return y;
}

SegmentSample sample_segment(const Vector& a, const Vector& b, RngStream& rng) {
    const double lambda = rng.uniform();
    return {lerp(a, b, lambda), lambda};
}

Vector sample_ball(const Vector& center, double radius, RngStream& rng) {
    if (radius < 0.0) throw std::invalid_argument("sample_ball: negative radius");
    const std::size_t d = center.dim();
    if (radius == 0.0) return center;
    Vector dir(d);
    if (d == 1) {
        dir[0] = rng.uniform() < 0.5 ? -1.0 : 1.0;
    } else {
        dir = sample_sphere(d, rng);
    }
    const double r = radius * std::pow(rng.uniform(), 1.0 / static_cast<double>(d));
    return center + r * dir;
}

}  // namespace pingd
