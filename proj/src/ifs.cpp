#include "selfsim/ifs.hpp"

#include <algorithm>
#include <limits>

namespace selfsim {

namespace {

constexpr double kContainmentSlack = 1e-15;

double cross(const Eigen::Vector2d& a, const Eigen::Vector2d& b) { return a.x() * b.y() - a.y() * b.x(); }

void check_convex_ccw(const std::vector<Eigen::Vector2d>& v)
{
    if (v.size() < 3) {
        throw InvalidGeometryError("polygon needs at least three vertices");
    }
    const std::size_t n = v.size();
    for (std::size_t i = 0; i < n; ++i) {
        const auto& a = v[i];
        const auto& b = v[(i + 1) % n];
        const auto& c = v[(i + 2) % n];
        if ((b - a).norm() == 0.0 || !(cross(b - a, c - b) > 1e-14)) {
            throw InvalidGeometryError("polygon is not strictly convex and counter-clockwise");
        }
    }
}

} // namespace

ConvexPolygon::ConvexPolygon(std::vector<Eigen::Vector2d> vertices, std::string name)
    : vertices_(std::move(vertices)), name_(std::move(name))
{
    check_convex_ccw(vertices_);
}

ConvexPolygon ConvexPolygon::from_lattice(std::vector<LatticePoint> vertices, std::string name)
{
    std::vector<Eigen::Vector2d> real;
    real.reserve(vertices.size());
    int level = vertices.empty() ? 0 : vertices.front().level;
    for (const auto& v : vertices) {
        if (v.level != level) {
            throw LevelMismatchError("polygon vertices must share one lattice level");
        }
        real.push_back(v.to_vector());
    }
    ConvexPolygon poly(std::move(real), std::move(name));
    poly.lattice_ = std::move(vertices);
    return poly;
}

double ConvexPolygon::edge_distance(std::size_t edge, const Eigen::Vector2d& x) const
{
    const auto& a = vertices_[edge];
    const auto& b = vertices_[(edge + 1) % vertices_.size()];
    const Eigen::Vector2d d = b - a;
    return cross(d, x - a) / d.norm();
}

double ConvexPolygon::min_edge_distance(const Eigen::Vector2d& x) const
{
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < vertices_.size(); ++i) {
        best = std::min(best, edge_distance(i, x));
    }
    return best;
}

bool ConvexPolygon::contains_closed(const Eigen::Vector2d& x, double tolerance) const
{
    return min_edge_distance(x) >= -tolerance;
}

std::optional<std::int64_t> ConvexPolygon::max_inscribed_key(const LatticePoint& center) const
{
    if (!is_lattice()) {
        throw InvalidGeometryError("exact containment needs a lattice polygon");
    }
    const int level = std::max(center.level, lattice_.front().level);
    const LatticePoint c = center.at_level(level);
    int128 best = std::numeric_limits<std::int64_t>::max();
    const std::size_t n = lattice_.size();
    for (std::size_t i = 0; i < n; ++i) {
        const LatticePoint a = lattice_[i].at_level(level);
        const LatticePoint b = lattice_[(i + 1) % n].at_level(level);
        const int128 da = b.p - a.p;
        const int128 db = b.q - a.q;
        // signed distance = sqrt(3) * cr / (2^level * sqrt(len2))
        const int128 cr = da * (c.q - a.q) - db * (c.p - a.p);
        if (cr <= 0) {
            return std::nullopt;
        }
        const int128 len2 = da * da + 3 * db * db;
        // K * len2 < 3 cr^2, expressed on the center's own level
        int128 bound = (3 * cr * cr - 1) / len2;
        bound >>= 2 * (level - center.level);
        best = std::min(best, bound);
    }
    return std::int64_t(best);
}

double similarity_dimension(std::span<const double> ratios)
{
    if (ratios.empty()) {
        throw DomainError("similarity dimension of an empty system");
    }
    for (double r : ratios) {
        if (!(r > 0.0 && r < 1.0)) {
            throw DomainError("contraction ratio " + std::to_string(r) + " outside (0,1)");
        }
    }
    auto excess = [&](double s) {
        double total = 0.0;
        for (double r : ratios) {
            total += std::pow(r, s);
        }
        return total - 1.0;
    };
    double lo = 0.0;
    double hi = 64.0;
    for (int iter = 0; iter < 200; ++iter) {
        const double mid = 0.5 * (lo + hi);
        if (excess(mid) > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

ConvexPolygon gasket_triangle_interior()
{
    return ConvexPolygon::from_lattice({{0, 0, 1}, {2, 0, 1}, {1, 1, 1}}, "tri");
}

ConvexPolygon gasket_rhombus(int opposite_vertex)
{
    switch (opposite_vertex) {
    case 0:
        return ConvexPolygon::from_lattice({{0, 0, 1}, {2, 0, 1}, {3, 1, 1}, {1, 1, 1}}, "r0");
    case 1:
        return ConvexPolygon::from_lattice({{0, 0, 1}, {2, 0, 1}, {1, 1, 1}, {-1, 1, 1}}, "r1");
    case 2:
        return ConvexPolygon::from_lattice({{0, 0, 1}, {1, -1, 1}, {2, 0, 1}, {1, 1, 1}}, "r2");
    default:
        throw ParameterError("rhombus index must be 0, 1 or 2");
    }
}

const IfsSystem2d& gasket_preset()
{
    static const IfsSystem2d system = [] {
        const double h = std::sqrt(3.0) / 2.0;
        std::vector<Similitude2d> maps{
            Similitude2d::homothety(0.5, {0.0, 0.0}),
            Similitude2d::homothety(0.5, {0.5, 0.0}),
            Similitude2d::homothety(0.5, {0.25, 0.5 * h}),
        };
        return IfsSystem2d(std::move(maps), {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0},
                           {gasket_triangle_interior(), gasket_rhombus(0), gasket_rhombus(1), gasket_rhombus(2)});
    }();
    return system;
}

bool is_gasket(const IfsSystem2d& system)
{
    const auto& ref = gasket_preset();
    if (system.size() != ref.size()) {
        return false;
    }
    for (std::size_t i = 0; i < ref.size(); ++i) {
        if ((system.map(i).linear() - ref.map(i).linear()).cwiseAbs().maxCoeff() > 1e-15 ||
            (system.map(i).translation() - ref.map(i).translation()).cwiseAbs().maxCoeff() > 1e-15 ||
            std::abs(system.probabilities()[i] - ref.probabilities()[i]) > 1e-15) {
            return false;
        }
    }
    return true;
}

bool ball_in_open_set(const ConvexPolygon& poly, const Eigen::Vector2d& center, double radius)
{
    if (radius < 0.0) {
        throw DomainError("negative radius");
    }
    return poly.min_edge_distance(center) - radius > kContainmentSlack;
}

bool ball_in_open_set(const ConvexPolygon& poly, const LatticePoint& center, std::int64_t radius_key)
{
    if (radius_key < 0) {
        throw DomainError("negative radius");
    }
    const auto bound = poly.max_inscribed_key(center);
    return bound.has_value() && radius_key <= *bound;
}

} // namespace selfsim
