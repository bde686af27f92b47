#include <doctest.h>

#include <cmath>
#include <random>

#include "selfsim/ifs.hpp"

using namespace selfsim;
using Eigen::Vector2d;

namespace {

const double kSqrt3 = std::sqrt(3.0);

bool close(const Vector2d& a, const Vector2d& b, double tol = 1e-15) { return (a - b).norm() <= tol; }

} // namespace

TEST_CASE("apply_word composes from the left")
{
    const auto& g = gasket_preset();
    CHECK(close(apply_word(g, Word{}, Vector2d(0.3, 0.1)), Vector2d(0.3, 0.1)));
    CHECK(close(apply_word(g, Word{{1}}, Vector2d(0.0, 0.0)), Vector2d(0.5, 0.0)));
    CHECK(close(apply_word(g, Word{{0, 1}}, Vector2d(0.0, 0.0)), Vector2d(0.25, 0.0)));
    CHECK_THROWS_AS(apply_word(g, Word{{3}}, Vector2d(0.0, 0.0)), InvalidWordError);
}

TEST_CASE("composition law and word maps")
{
    const auto& g = gasket_preset();
    std::mt19937_64 rng(7);
    for (int n = 0; n < 100; ++n) {
        Word a, b;
        for (int i = 0; i < int(rng() % 6); ++i) {
            a.digits.push_back(std::uint8_t(rng() % 3));
        }
        for (int i = 0; i < int(rng() % 6); ++i) {
            b.digits.push_back(std::uint8_t(rng() % 3));
        }
        const Vector2d x(double(rng() % 1000) / 1000.0, double(rng() % 1000) / 1000.0);
        CHECK(close(apply_word(g, a + b, x), apply_word(g, a, apply_word(g, b, x)), 1e-14));
        const auto f = word_map(g, a + b);
        CHECK(f.ratio() == doctest::Approx(std::pow(0.5, double((a + b).size()))).epsilon(1e-14));
        CHECK(close(f(x), apply_word(g, a + b, x), 1e-14));
    }
}

TEST_CASE("similitudes scale distances by their ratio")
{
    std::mt19937_64 rng(3);
    const double angle = 0.7;
    Eigen::Matrix2d rot;
    rot << std::cos(angle), -std::sin(angle), std::sin(angle), std::cos(angle);
    Eigen::Matrix2d refl;
    refl << 1, 0, 0, -1;
    for (const Eigen::Matrix2d& lin : {Eigen::Matrix2d(0.3 * rot), Eigen::Matrix2d(0.6 * rot * refl)}) {
        const Similitude2d f(lin, Vector2d(0.1, -0.2));
        for (int i = 0; i < 50; ++i) {
            const Vector2d x = Vector2d::Random();
            const Vector2d y = Vector2d::Random();
            CHECK(std::abs((f(x) - f(y)).norm() - f.ratio() * (x - y).norm()) <= 1e-12);
            CHECK(close(f.inverse(f(x)), x, 1e-12));
        }
    }
    Eigen::Matrix2d shear;
    shear << 0.5, 0.1, 0.0, 0.5;
    CHECK_THROWS_AS(Similitude2d(shear, Vector2d::Zero()), DomainError);
    CHECK_THROWS_AS(Similitude2d::homothety(1.5, Vector2d::Zero()), DomainError);
}

TEST_CASE("similarity dimension")
{
    const double third[] = {1.0 / 3, 1.0 / 3, 1.0 / 3};
    const double half[] = {0.5, 0.5, 0.5};
    const double mixed[] = {0.5, 0.25};
    CHECK(similarity_dimension(third) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(similarity_dimension(half) == doctest::Approx(std::log(3.0) / std::log(2.0)).epsilon(1e-12));
    // (1/2)^s + (1/4)^s = 1 gives 2^-s = (sqrt(5) - 1) / 2
    const double golden = -std::log2((std::sqrt(5.0) - 1.0) / 2.0);
    CHECK(similarity_dimension(mixed) == doctest::Approx(golden).epsilon(1e-12));
    CHECK(similarity_dimension(mixed) == doctest::Approx(0.694242).epsilon(1e-6));

    const double bad[] = {0.5, 1.0};
    CHECK_THROWS_AS(similarity_dimension(bad), DomainError);
    CHECK_THROWS_AS(similarity_dimension(std::span<const double>{}), DomainError);

    // increasing any ratio increases s
    const double bigger[] = {0.6, 0.25};
    CHECK(similarity_dimension(bigger) > similarity_dimension(mixed));
}

TEST_CASE("gasket preset")
{
    const auto& g = gasket_preset();
    CHECK(g.maps().size() == 3);
    CHECK(close(g.map(0).fixed_point(), Vector2d(0, 0)));
    CHECK(close(g.map(1).fixed_point(), Vector2d(1, 0)));
    CHECK(close(g.map(2).fixed_point(), Vector2d(0.5, kSqrt3 / 2), 1e-15));
    const double s = g.dimension();
    CHECK(3.0 * std::pow(0.5, s) == doctest::Approx(1.0).epsilon(1e-12));
    for (double p : g.probabilities()) {
        CHECK(p == doctest::Approx(1.0 / 3).epsilon(1e-15));
    }
    REQUIRE(g.open_sets().size() == 4);
    CHECK(g.open_sets()[0].name() == "tri");
    CHECK(is_gasket(g));

    // f_i(O) inside the closure of O, with its centroid strictly inside
    for (const auto& o : g.open_sets()) {
        for (const auto& f : g.maps()) {
            Vector2d centroid = Vector2d::Zero();
            for (const auto& v : o.vertices()) {
                CHECK(o.contains_closed(f(v)));
                centroid += f(v);
            }
            centroid /= double(o.vertices().size());
            CHECK(o.min_edge_distance(centroid) > 1e-12);
        }
    }
}

TEST_CASE("invalid systems are rejected")
{
    const auto& g = gasket_preset();
    CHECK_THROWS_AS(IfsSystem2d(g.maps(), {0.5, 0.5, 0.5}, g.open_sets()), DomainError);
    CHECK_THROWS_AS(IfsSystem2d(g.maps(), {0.5, 0.5}, g.open_sets()), ParameterError);
    // a square does not contain the image of its corner under f_1
    const ConvexPolygon square({{0, 0}, {0.6, 0}, {0.6, 0.6}, {0, 0.6}}, "sq");
    CHECK_THROWS_AS(IfsSystem2d(g.maps(), g.probabilities(), {square}), InvalidGeometryError);
}

TEST_CASE("polygons must be strictly convex and counter-clockwise")
{
    CHECK_THROWS_AS(ConvexPolygon({{0, 0}, {1, 0}}), InvalidGeometryError);
    CHECK_THROWS_AS(ConvexPolygon({{0, 0}, {0, 1}, {1, 0}}), InvalidGeometryError);
    CHECK_THROWS_AS(ConvexPolygon({{0, 0}, {1, 0}, {2, 0}, {1, 1}}), InvalidGeometryError);
    CHECK_NOTHROW(ConvexPolygon({{0, 0}, {1, 0}, {0, 1}}));
}

TEST_CASE("ball in open set")
{
    const auto tri = gasket_triangle_interior();
    CHECK(ball_in_open_set(tri, Vector2d(0.5, kSqrt3 / 6), 0.1));
    CHECK(ball_in_open_set(tri, Vector2d(0.5, kSqrt3 / 6), 0.28));
    CHECK_FALSE(ball_in_open_set(tri, Vector2d(0.5, kSqrt3 / 6), 0.29));
    CHECK_FALSE(ball_in_open_set(tri, Vector2d(0, 0), 1e-9));
    CHECK_FALSE(ball_in_open_set(tri, Vector2d(0, 0), 0.0));

    const auto r2 = gasket_rhombus(2);
    CHECK(ball_in_open_set(r2, Vector2d(0.5, 0), 0.160543));
    // lattice version: key 6 at level 4 is radius sqrt(6)/16 = 0.1530...
    CHECK(ball_in_open_set(r2, LatticePoint{8, 0, 4}, 6));
    // the inradius of R_2 around (1/2, 0) is sqrt(3)/4; K = 48 at level 4 hits it exactly
    CHECK_FALSE(ball_in_open_set(r2, LatticePoint{8, 0, 4}, 48));
    CHECK(ball_in_open_set(r2, LatticePoint{8, 0, 4}, 47));
}

TEST_CASE("exact inscribed key agrees with the floating distance")
{
    std::mt19937_64 rng(11);
    for (const auto& poly : gasket_preset().open_sets()) {
        for (int n = 0; n < 300; ++n) {
            const int level = 6;
            const LatticePoint c{std::int64_t(rng() % 97) - 16, std::int64_t(rng() % 40) - 4, level};
            const auto key = poly.max_inscribed_key(c);
            const double dist = poly.min_edge_distance(c.to_vector());
            if (!key) {
                CHECK(dist <= 1e-12);
                continue;
            }
            const double scale = std::ldexp(1.0, -level);
            CHECK(std::sqrt(double(*key)) * scale < dist + 1e-12);
            CHECK(std::sqrt(double(*key + 1)) * scale >= dist - 1e-12);
        }
    }
}
