#pragma once

#include <Eigen/Core>

#include <cmath>
#include <cstdint>
#include <functional>

#include "selfsim/errors.hpp"

namespace selfsim {

using int128 = __int128;

// Point (p / 2^level, q * sqrt(3) / 2^level) of the triangular lattice that
// carries every vertex iterate of the gasket.
struct LatticePoint {
    std::int64_t p = 0;
    std::int64_t q = 0;
    int level = 0;

    friend bool operator==(const LatticePoint&, const LatticePoint&) = default;

    template <typename Scalar = double>
    Eigen::Matrix<Scalar, 2, 1> to_vector() const
    {
        const Scalar scale = std::ldexp(Scalar(1), -level);
        return {Scalar(p) * scale, Scalar(q) * std::sqrt(Scalar(3)) * scale};
    }

    // Same point expressed on a finer lattice.
    LatticePoint at_level(int finer) const
    {
        if (finer < level) {
            throw LevelMismatchError("cannot coarsen a lattice point");
        }
        const int shift = finer - level;
        return {p << shift, q << shift, finer};
    }
};

// 4^level times the squared distance: dp^2 + 3 dq^2.
inline std::int64_t dist2_key(const LatticePoint& a, const LatticePoint& b)
{
    if (a.level != b.level) {
        throw LevelMismatchError("points on levels " + std::to_string(a.level) + " and " +
                                 std::to_string(b.level));
    }
    const std::int64_t dp = a.p - b.p;
    const std::int64_t dq = a.q - b.q;
    return dp * dp + 3 * dq * dq;
}

// Exact squared distance as numerator / 4^level.
struct Dyadic4Rational {
    std::int64_t numerator = 0;
    int level = 0;

    double value() const { return std::ldexp(double(numerator), -2 * level); }
    friend bool operator==(const Dyadic4Rational&, const Dyadic4Rational&) = default;
};

inline Dyadic4Rational dist2_exact(const LatticePoint& a, const LatticePoint& b)
{
    return {dist2_key(a, b), a.level};
}

// Sign of sqrt(key) - (sqrt(radius_key) + shift), all integers, evaluated
// exactly. Radii of the form (sqrt(K) + shift) / 2^k describe balls whose
// boundary passes through a lattice point, optionally widened or narrowed by
// `shift` lattice units. A negative radius compares below every distance.
inline int compare_sqrt_shift(std::int64_t key, std::int64_t radius_key, std::int64_t shift)
{
    if (shift == 0) {
        return (key > radius_key) - (key < radius_key);
    }
    const int128 delta = shift;
    const int128 rk = radius_key;
    if (shift < 0 && delta * delta > rk) {
        return 1;
    }
    // sqrt(key) vs sqrt(rk) + delta  <=>  key - rk - delta^2 vs 2 delta sqrt(rk)
    const int128 a = int128(key) - rk - delta * delta;
    const int128 rhs2 = 4 * delta * delta * rk;
    if (shift > 0) {
        if (a < 0) {
            return -1;
        }
        const int128 a2 = a * a;
        return (a2 > rhs2) - (a2 < rhs2);
    }
    if (a >= 0) {
        return (a == 0 && rk == 0) ? 0 : 1;
    }
    const int128 a2 = a * a;
    return (rhs2 > a2) - (rhs2 < a2);
}

struct LatticePointHash {
    std::size_t operator()(const LatticePoint& pt) const noexcept
    {
        const auto h = std::uint64_t(pt.p) * 0x9E3779B97F4A7C15ull ^ (std::uint64_t(pt.q) + 0x632BE59BD9B4E019ull);
        return std::hash<std::uint64_t>{}(h ^ std::uint64_t(pt.level) << 58);
    }
};

} // namespace selfsim
