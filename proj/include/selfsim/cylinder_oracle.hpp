#pragma once

#include <Eigen/Core>

#include <cstdint>

#include "selfsim/ifs.hpp"
#include "selfsim/spatial_query.hpp"

namespace selfsim {

inline constexpr int kMaxCylinderLevel = 16;

/// Two-sided enclosure of mu(B) from the m-cylinders of the gasket: cylinders
/// whose hull triangle lies in the closed ball count towards the lower bound,
/// cylinders whose triangle misses the ball are dropped, the rest are boundary.
struct CylinderInterval {
    double lower = 0.0;
    double upper = 0.0;
    int level = 0;
    std::uint64_t inside = 0;
    std::uint64_t boundary = 0;
    std::uint64_t outside = 0;
};

// The enclosure is for the closed ball; since mu gives no mass to circles it
// also encloses the open ball.
CylinderInterval measure_interval(const IfsSystem2d& system, const Ball& b, int m);

struct SandwichRecord {
    double x = 0.0;
    double y = 0.0;
    double d = 0.0;
    int k = 0;
    int m = 0;
    double l = 0.0; // mu_k(B(x, d - 2^-k))
    double u = 0.0; // mu_k(open B(x, d + 2^-k))
    double L = 0.0;
    double U = 0.0;
    bool ok = false;
};

/// Checks that the mu_k sandwich [l, u] and the cylinder enclosure [L, U] of
/// mu(B(x, d)) intersect. Requires 2^-k < d <= max_i |z_i - x|.
SandwichRecord sandwich_check(const GridIndex& idx, const Eigen::Vector2d& x, double d, int k, int m);

double point_triangle_distance(const Eigen::Vector2d& x, const Eigen::Vector2d& a, const Eigen::Vector2d& b,
                               const Eigen::Vector2d& c);

} // namespace selfsim
