#pragma once

#include <cstdint>
#include <random>
#include <string_view>

#include "pingd/vector.hpp"

namespace pingd {

/// Reproducible random stream identified by (seed, stream_id).
///
/// The engine is std::mt19937_64 seeded through std::seed_seq with the four
/// 32-bit halves of seed and stream_id; both are bit-specified by the C++
/// standard. Uniforms take the top 53 bits of one engine output; normals use
/// the Marsaglia polar method. No std:: distribution is used, so a draw
/// sequence is identical on every conforming platform (up to libm `log`).
class RngStream {
public:
    RngStream(std::uint64_t seed, std::uint64_t stream_id);

    [[nodiscard]] std::uint64_t seed() const noexcept { return seed_; }
    [[nodiscard]] std::uint64_t stream_id() const noexcept { return stream_id_; }

    /// Uniform on [0, 1).
    double uniform();
    double normal();

    static constexpr std::string_view identity =
        "mt19937_64/seed_seq(seed_lo,seed_hi,stream_lo,stream_hi);u53;marsaglia-polar;v1";

private:
    std::uint64_t seed_;
    std::uint64_t stream_id_;
    std::mt19937_64 engine_;
    double spare_normal_ = 0.0;
    bool has_spare_ = false;
};

/// Uniform point on the unit sphere in R^n (n >= 2) from normalized Gaussians.
Vector sample_sphere(std::size_t n, RngStream& rng);

/// v minus its projection on `axis`. Throws std::invalid_argument when axis
/// is zero or the lengths differ.
Vector conic_component(const Vector& v, const Vector& axis);

struct SegmentSample {
    Vector point;
    double lambda = 0.0;
};

/// y = a + lambda (b - a), lambda ~ Unif[0, 1).
SegmentSample sample_segment(const Vector& a, const Vector& b, RngStream& rng);

/// Affine interpolation used by sample_segment.
Vector lerp(const Vector& a, const Vector& b, double lambda);

/// Uniform point in the closed ball of the given radius around `center`.
Vector sample_ball(const Vector& center, double radius, RngStream& rng);

}  // namespace pingd
