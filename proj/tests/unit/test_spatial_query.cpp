#include <doctest.h>

#include <cmath>
#include <random>

#include "selfsim/spatial_query.hpp"

using namespace selfsim;
using Eigen::Vector2d;

namespace {

std::uint64_t scan_units(const DiscreteMeasure& m, const Vector2d& c, double r, BallMode mode)
{
    std::uint64_t units = 0;
    for (const auto& a : m.atoms()) {
        const double d2 = (a.point.to_vector() - c).squaredNorm();
        if (mode == BallMode::open ? d2 < r * r : d2 <= r * r) {
            units += a.units;
        }
    }
    return units;
}

} // namespace

TEST_CASE("index construction")
{
    const auto m1 = generate_support(gasket_preset(), 1);
    const auto i1 = build_index(m1, 0.5);
    CHECK(i1.atom_count() == 3);
    CHECK(i1.total_units() * i1.unit_mass() == doctest::Approx(1.0));

    const auto m8 = generate_support(gasket_preset(), 8);
    const auto i8 = build_index(m8, std::ldexp(1.0, -8));
    CHECK(i8.bucket_count() <= std::size_t((256 + 1) * (128 + 1)));
    CHECK(i8.atom_count() == m8.size());

    CHECK_THROWS_AS(build_index(m1, 0.0), ParameterError);
    CHECK_THROWS_AS(build_index(m1, -1.0), ParameterError);
}

TEST_CASE("ball masses at the vertex")
{
    const auto i1 = build_index(generate_support(gasket_preset(), 1));
    CHECK(ball_mass(i1, Ball::real({0, 0}, 1.0, BallMode::closed)) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(ball_mass(i1, Ball::real({0, 0}, 1.0 - 1e-9, BallMode::open)) == doctest::Approx(1.0 / 3).epsilon(1e-15));

    const auto i2 = build_index(generate_support(gasket_preset(), 2));
    CHECK(ball_mass(i2, Ball::real({0, 0}, 0.5, BallMode::closed)) == doctest::Approx(5.0 / 9).epsilon(1e-15));
    CHECK(ball_mass(i2, Ball::real({0, 0}, 0.5 - 1e-9, BallMode::open)) == doctest::Approx(1.0 / 9).epsilon(1e-15));
    CHECK(ball_units(i2, Ball::lattice({0, 0, 2}, 4, BallMode::closed)) == 5);
    CHECK(ball_units(i2, Ball::lattice({0, 0, 2}, 4, BallMode::open)) == 1);
    // coarser centre description of the same ball
    CHECK(ball_units(i2, Ball::lattice({0, 0, 1}, 1, BallMode::closed)) == 5);
    CHECK(ball_mass(i2, Ball::real({-3, -3}, 0.5, BallMode::closed)) == 0.0);
}

TEST_CASE("index queries agree with a full scan")
{
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-0.2, 1.2);
    std::uniform_real_distribution<double> rad(0.0, 0.8);
    for (int k : {2, 5, 9}) {
        const auto m = generate_support(gasket_preset(), k);
        for (double cell : {0.25, 0.07, std::ldexp(1.0, -k)}) {
            const auto idx = build_index(m, cell);
            for (int n = 0; n < 100; ++n) {
                const Vector2d c(u(rng), u(rng));
                const double r = rad(rng);
                const BallMode mode = n % 2 ? BallMode::open : BallMode::closed;
                CHECK(ball_units(idx, Ball::real(c, r, mode)) == scan_units(m, c, r, mode));
            }
        }
    }
}

TEST_CASE("shifted lattice radii")
{
    const auto m = generate_support(gasket_preset(), 6);
    const auto idx = build_index(m);
    std::mt19937_64 rng(9);
    for (int n = 0; n < 200; ++n) {
        const auto& c = m.atoms()[rng() % m.size()].point;
        const std::int64_t key = std::int64_t(rng() % 3000);
        for (std::int64_t shift : {-1, 1}) {
            const double r = (std::sqrt(double(key)) + double(shift)) / 64.0;
            const auto b = Ball::lattice(c, key, BallMode::open, shift);
            if (r <= 0) {
                CHECK(ball_units(idx, b) == 0);
                continue;
            }
            // no atom sits at an irrational distance from a lattice point, so the scan is exact here
            CHECK(ball_units(idx, b) == scan_units(m, c.to_vector(), r, BallMode::open));
        }
    }
}

TEST_CASE("restriction to a ball")
{
    const auto m = generate_support(gasket_preset(), 7);
    const auto idx = build_index(m);
    const LatticePoint c{64, 0, 7};
    const auto b = Ball::lattice(c, 300, BallMode::closed);
    const auto r = restrict_to_ball(idx, b);
    CHECK(r.total_units() == ball_units(idx, b));
    CHECK(r.level() == 7);
    CHECK(r.size() > 1);
    for (const auto& a : r.atoms()) {
        CHECK(dist2_key(a.point, c) <= 300);
    }
}

TEST_CASE("candidate radii at the vertex")
{
    const auto idx = build_index(generate_support(gasket_preset(), 2));
    const auto all = candidate_radii(idx, {0, 0, 2}, 0.0, 1.0);
    REQUIRE(all.size() == 4);
    CHECK(all[0].radius == 0.0);
    CHECK(all[1].radius == 0.5);
    CHECK(all[2].radius == doctest::Approx(std::sqrt(3.0) / 2).epsilon(1e-15));
    CHECK(all[3].radius == 1.0);
    CHECK(all[2].key == 12);

    const auto mid = candidate_radii(idx, {0, 0, 2}, 0.4, 0.6);
    REQUIRE(mid.size() == 1);
    CHECK(mid[0].radius == 0.5);

    const auto zero = candidate_radii(idx, {0, 0, 2}, 0.0, 0.0);
    REQUIRE(zero.size() == 1);
    CHECK(zero[0].key == 0);
}

TEST_CASE("radial shells merge equal distances")
{
    const auto m = generate_support(gasket_preset(), 8);
    const auto idx = build_index(m);
    const LatticePoint c{128, 0, 8};
    const auto shells = radial_shells(idx, c, 1 << 14);
    std::uint64_t total = 0;
    for (std::size_t i = 0; i < shells.size(); ++i) {
        if (i) {
            CHECK(shells[i - 1].key < shells[i].key);
        }
        total += shells[i].units;
    }
    CHECK(total == ball_units(idx, Ball::lattice(c, 1 << 14, BallMode::closed)));
}
