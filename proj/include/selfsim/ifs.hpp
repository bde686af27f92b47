#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "selfsim/errors.hpp"
#include "selfsim/lattice_point.hpp"

namespace selfsim {

template <typename Scalar>
using Vector2 = Eigen::Matrix<Scalar, 2, 1>;
template <typename Scalar>
using Matrix2 = Eigen::Matrix<Scalar, 2, 2>;

/// Contractive similitude x -> linear * x + translation with linear equal to
/// `ratio` times an orthogonal matrix. Reflections are allowed.
template <typename Scalar>
class Similitude {
public:
    Similitude(const Matrix2<Scalar>& linear, const Vector2<Scalar>& translation)
        : linear_(linear), translation_(translation)
    {
        ratio_ = std::sqrt(std::abs(linear.determinant()));
        const Matrix2<Scalar> gram = linear.transpose() * linear;
        const Matrix2<Scalar> target = ratio_ * ratio_ * Matrix2<Scalar>::Identity();
        if (!(ratio_ > Scalar(0)) || ratio_ > Scalar(1) + Scalar(1e-12) ||
            (gram - target).cwiseAbs().maxCoeff() > Scalar(1e-12)) {
            throw DomainError("linear part is not a contracting similarity");
        }
    }

    static Similitude homothety(Scalar ratio, const Vector2<Scalar>& translation)
    {
        return Similitude(ratio * Matrix2<Scalar>::Identity(), translation);
    }

    const Matrix2<Scalar>& linear() const { return linear_; }
    const Vector2<Scalar>& translation() const { return translation_; }
    Scalar ratio() const { return ratio_; }

    Vector2<Scalar> operator()(const Vector2<Scalar>& x) const { return linear_ * x + translation_; }

    Vector2<Scalar> inverse(const Vector2<Scalar>& y) const
    {
        return linear_.inverse() * (y - translation_);
    }

    // (*this) o inner
    Similitude compose(const Similitude& inner) const
    {
        return Similitude(linear_ * inner.linear_, linear_ * inner.translation_ + translation_);
    }

    Vector2<Scalar> fixed_point() const
    {
        return (Matrix2<Scalar>::Identity() - linear_).inverse() * translation_;
    }

private:
    Matrix2<Scalar> linear_;
    Vector2<Scalar> translation_;
    Scalar ratio_;
};

/// Finite word over the digit alphabet {0, ..., m-1}; empty word is the identity.
struct Word {
    std::vector<std::uint8_t> digits;

    std::size_t size() const { return digits.size(); }
    bool empty() const { return digits.empty(); }

    Word prefix(std::size_t n) const
    {
        return Word{{digits.begin(), digits.begin() + std::ptrdiff_t(std::min(n, digits.size()))}};
    }

    friend Word operator+(const Word& a, const Word& b)
    {
        Word out = a;
        out.digits.insert(out.digits.end(), b.digits.begin(), b.digits.end());
        return out;
    }
    friend bool operator==(const Word&, const Word&) = default;
};

/// Strictly convex counter-clockwise polygon used as an open set. Polygons with
/// vertices on the gasket lattice also keep the exact lattice form so ball
/// containment can be decided with integer arithmetic.
class ConvexPolygon {
public:
    explicit ConvexPolygon(std::vector<Eigen::Vector2d> vertices, std::string name = {});
    static ConvexPolygon from_lattice(std::vector<LatticePoint> vertices, std::string name = {});

    const std::vector<Eigen::Vector2d>& vertices() const { return vertices_; }
    const std::vector<LatticePoint>& lattice_vertices() const { return lattice_; }
    bool is_lattice() const { return !lattice_.empty(); }
    const std::string& name() const { return name_; }

    // Signed distance from x to the line through edge i (positive inside).
    double edge_distance(std::size_t edge, const Eigen::Vector2d& x) const;
    double min_edge_distance(const Eigen::Vector2d& x) const;
    bool contains_closed(const Eigen::Vector2d& x, double tolerance = 1e-12) const;

    // Largest integer key K such that the closed ball of radius sqrt(K)/2^level
    // around `center` lies in the open polygon; nullopt when the center is not
    // strictly inside. Requires a lattice polygon.
    std::optional<std::int64_t> max_inscribed_key(const LatticePoint& center) const;

private:
    std::vector<Eigen::Vector2d> vertices_;
    std::vector<LatticePoint> lattice_;
    std::string name_;
};

double similarity_dimension(std::span<const double> ratios);

/// Similitude system together with its probability vector, similarity
/// dimension and a list of feasible open sets.
template <typename Scalar>
class IfsSystem {
public:
    IfsSystem(std::vector<Similitude<Scalar>> maps, std::vector<Scalar> probabilities,
              std::vector<ConvexPolygon> open_sets)
        : maps_(std::move(maps)), probabilities_(std::move(probabilities)), open_sets_(std::move(open_sets))
    {
        if (maps_.empty() || maps_.size() != probabilities_.size()) {
            throw ParameterError("need one probability per map");
        }
        Scalar total = 0;
        for (Scalar p : probabilities_) {
            if (!(p > 0)) {
                throw DomainError("probabilities must be positive");
            }
            total += p;
        }
        if (std::abs(total - Scalar(1)) > Scalar(1e-12)) {
            throw DomainError("probabilities do not sum to one");
        }
        std::vector<double> ratios;
        for (const auto& f : maps_) {
            ratios.push_back(double(f.ratio()));
        }
        dimension_ = Scalar(similarity_dimension(ratios));
        for (const auto& poly : open_sets_) {
            for (const auto& f : maps_) {
                for (const auto& v : poly.vertices()) {
                    const Vector2<Scalar> image = f(v.template cast<Scalar>());
                    if (!poly.contains_closed(image.template cast<double>())) {
                        throw InvalidGeometryError("open set " + poly.name() + " is not mapped into itself");
                    }
                }
            }
        }
    }

    std::size_t size() const { return maps_.size(); }
    const std::vector<Similitude<Scalar>>& maps() const { return maps_; }
    const Similitude<Scalar>& map(std::size_t i) const { return maps_.at(i); }
    const std::vector<Scalar>& probabilities() const { return probabilities_; }
    Scalar dimension() const { return dimension_; }
    const std::vector<ConvexPolygon>& open_sets() const { return open_sets_; }

    void check_word(const Word& w) const
    {
        for (auto digit : w.digits) {
            if (digit >= maps_.size()) {
                throw InvalidWordError("digit " + std::to_string(int(digit)) + " out of range for " +
                                       std::to_string(maps_.size()) + " maps");
            }
        }
    }

private:
    std::vector<Similitude<Scalar>> maps_;
    std::vector<Scalar> probabilities_;
    std::vector<ConvexPolygon> open_sets_;
    Scalar dimension_ = 0;
};

using Similitude2d = Similitude<double>;
using IfsSystem2d = IfsSystem<double>;

/// f_{w_1} o ... o f_{w_k} applied to x.
template <typename Scalar>
Vector2<Scalar> apply_word(const IfsSystem<Scalar>& system, const Word& w, const Vector2<Scalar>& x)
{
    system.check_word(w);
    Vector2<Scalar> y = x;
    for (auto it = w.digits.rbegin(); it != w.digits.rend(); ++it) {
        y = system.map(*it)(y);
    }
    return y;
}

template <typename Scalar>
Similitude<Scalar> word_map(const IfsSystem<Scalar>& system, const Word& w)
{
    system.check_word(w);
    auto composed = Similitude<Scalar>(Matrix2<Scalar>::Identity(), Vector2<Scalar>::Zero());
    for (auto digit : w.digits) {
        composed = composed.compose(system.map(digit));
    }
    return composed;
}

// The three half-scale homotheties of the gasket with natural weights and the
// open sets {int T, R0, R1, R2}; Ri is the interior of T joined with its mirror
// image across the edge opposite the vertex z_i.
const IfsSystem2d& gasket_preset();

ConvexPolygon gasket_triangle_interior();
ConvexPolygon gasket_rhombus(int opposite_vertex);

bool is_gasket(const IfsSystem2d& system);

/// Closed ball B(center, radius) contained in the open polygon. Accepts only
/// when every edge distance exceeds the radius by more than 1e-15.
bool ball_in_open_set(const ConvexPolygon& poly, const Eigen::Vector2d& center, double radius);

/// Exact variant for a lattice center and radius sqrt(radius_key) / 2^level.
bool ball_in_open_set(const ConvexPolygon& poly, const LatticePoint& center, std::int64_t radius_key);

} // namespace selfsim
