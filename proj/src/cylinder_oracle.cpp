#include "selfsim/cylinder_oracle.hpp"

#include <algorithm>
#include <cmath>

namespace selfsim {

namespace {

constexpr double kOutsideMargin = 1e-12;

double cross(const Eigen::Vector2d& a, const Eigen::Vector2d& b) { return a.x() * b.y() - a.y() * b.x(); }

double point_segment_distance(const Eigen::Vector2d& x, const Eigen::Vector2d& a, const Eigen::Vector2d& b)
{
    const Eigen::Vector2d ab = b - a;
    const double t = std::clamp((x - a).dot(ab) / ab.squaredNorm(), 0.0, 1.0);
    return (a + t * ab - x).norm();
}

enum class Cls { inside, outside, boundary };

class Classifier {
public:
    Classifier(const Ball& ball, int m) : ball_(ball), m_(m), lattice_level_(m + 1)
    {
        if (ball_.exact) {
            lattice_level_ = std::max(lattice_level_, ball_.exact->center.level);
            exact_ = ball_.exact->at_level(lattice_level_);
        }
    }

    CylinderInterval run()
    {
        CylinderInterval out;
        out.level = m_;
        visit(0, 0, 0, out);
        // dividing by the exact 3^m keeps equal rationals equal across levels
        const double leaves = double(out.inside + out.boundary + out.outside);
        out.lower = double(out.inside) / leaves;
        out.upper = double(out.inside + out.boundary) / leaves;
        return out;
    }

private:
    // Triangle at `depth` with lower-left corner (p0, q0) in level-(m+1) units.
    void visit(std::int64_t p0, std::int64_t q0, int depth, CylinderInterval& out)
    {
        const std::int64_t s = std::int64_t(1) << (m_ - depth); // half side in level-(m+1) units
        const LatticePoint v[3] = {{p0, q0, m_ + 1}, {p0 + 2 * s, q0, m_ + 1}, {p0 + s, q0 + s, m_ + 1}};
        const Cls cls = classify(v);
        std::uint64_t leaves = 1;
        for (int i = depth; i < m_; ++i) {
            leaves *= 3;
        }
        if (cls == Cls::inside) {
            out.inside += leaves;
            return;
        }
        if (cls == Cls::outside) {
            out.outside += leaves;
            return;
        }
        if (depth == m_) {
            out.boundary += 1;
            return;
        }
        const std::int64_t h = s / 2;
        visit(p0, q0, depth + 1, out);
        visit(p0 + s, q0, depth + 1, out);
        visit(p0 + h, q0 + h, depth + 1, out);
    }

    Cls classify(const LatticePoint (&v)[3]) const
    {
        Eigen::Vector2d real[3];
        for (int i = 0; i < 3; ++i) {
            real[i] = v[i].to_vector();
        }
        if (point_triangle_distance(ball_.center, real[0], real[1], real[2]) > ball_.radius + kOutsideMargin) {
            return Cls::outside;
        }
        bool inside = true;
        for (int i = 0; i < 3 && inside; ++i) {
            if (exact_) {
                const LatticePoint w = v[i].at_level(lattice_level_);
                const std::int64_t dp = w.p - exact_->center.p;
                const std::int64_t dq = w.q - exact_->center.q;
                inside = compare_sqrt_shift(dp * dp + 3 * dq * dq, exact_->key, exact_->shift) <= 0;
            } else {
                inside = (real[i] - ball_.center).norm() < ball_.radius - kOutsideMargin;
            }
        }
        return inside ? Cls::inside : Cls::boundary;
    }

    const Ball& ball_;
    int m_;
    int lattice_level_;
    std::optional<LatticeRadius> exact_;
};

} // namespace

double point_triangle_distance(const Eigen::Vector2d& x, const Eigen::Vector2d& a, const Eigen::Vector2d& b,
                               const Eigen::Vector2d& c)
{
    const double c1 = cross(b - a, x - a);
    const double c2 = cross(c - b, x - b);
    const double c3 = cross(a - c, x - c);
    const bool has_neg = c1 < 0 || c2 < 0 || c3 < 0;
    const bool has_pos = c1 > 0 || c2 > 0 || c3 > 0;
    if (!(has_neg && has_pos)) {
        return 0.0;
    }
    return std::min({point_segment_distance(x, a, b), point_segment_distance(x, b, c), point_segment_distance(x, c, a)});
}

CylinderInterval measure_interval(const IfsSystem2d& system, const Ball& b, int m)
{
    if (m < 1 || m > kMaxCylinderLevel) {
        throw ResourceError("cylinder level " + std::to_string(m) + " outside [1, " +
                            std::to_string(kMaxCylinderLevel) + "]");
    }
    if (!is_gasket(system)) {
        throw UnsupportedSystemError("cylinder enclosures are implemented for the gasket preset only");
    }
    return Classifier(b, m).run();
}

SandwichRecord sandwich_check(const GridIndex& idx, const Eigen::Vector2d& x, double d, int k, int m)
{
    if (k != idx.level()) {
        throw LevelMismatchError("index level " + std::to_string(idx.level()) + " but k = " + std::to_string(k));
    }
    const double step = std::ldexp(1.0, -k);
    const auto& system = gasket_preset();
    double reach = 0.0;
    for (const auto& f : system.maps()) {
        reach = std::max(reach, (f.fixed_point() - x).norm());
    }
    if (!(d > step) || d > reach) {
        throw DomainError("sandwich needs 2^-k < d <= max_i |z_i - x|");
    }
    SandwichRecord rec;
    rec.x = x.x();
    rec.y = x.y();
    rec.d = d;
    rec.k = k;
    rec.m = m;
    rec.l = ball_mass(idx, Ball::real(x, d - step, BallMode::closed));
    rec.u = ball_mass(idx, Ball::real(x, d + step, BallMode::open));
    const auto cyl = measure_interval(system, Ball::real(x, d, BallMode::closed), m);
    rec.L = cyl.lower;
    rec.U = cyl.upper;
    rec.ok = std::max(rec.l, rec.L) <= std::min(rec.u, rec.U);
    return rec;
}

} // namespace selfsim
