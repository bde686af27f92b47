#include <doctest.h>

#include <cmath>
#include <random>

#include "selfsim/extremal_density.hpp"

using namespace selfsim;
using Eigen::Vector2d;

namespace {

const double kS = std::log(3.0) / std::log(2.0);

struct BruteExtreme {
    double density;
    Vector2d center;
    double radius;
};

// Every centre in A_k and every radius |c - a|, a in A_k, with radius at least
// min_radius, the ball inside one of the open sets and not inside any f_i(O).
// Masses by full scans; containment with floating distances.
BruteExtreme brute_typical(const DiscreteMeasure& m, Extremum which, double min_radius)
{
    const auto& g = gasket_preset();
    const auto& sets = g.open_sets();
    BruteExtreme best{which == Extremum::min ? 1e300 : -1.0, {}, 0.0};
    for (const auto& c : m.atoms()) {
        const Vector2d x = c.point.to_vector();
        for (const auto& t : m.atoms()) {
            const double r = (t.point.to_vector() - x).norm();
            if (r < min_radius) {
                continue;
            }
            bool typical = false;
            for (const auto& o : sets) {
                typical = typical || ball_in_open_set(o, x, r);
            }
            bool reducible = false;
            for (const auto& f : g.maps()) {
                for (const auto& o : sets) {
                    reducible = reducible || ball_in_open_set(o, f.inverse(x), 2 * r);
                }
            }
            if (!typical || reducible) {
                continue;
            }
            double inside = 0.0;
            const double key = double(dist2_key(c.point, t.point));
            for (std::size_t i = 0; i < m.size(); ++i) {
                const double k2 = double(dist2_key(c.point, m.atoms()[i].point));
                if (which == Extremum::min ? k2 < key : k2 <= key) {
                    inside += m.weight(i);
                }
            }
            const double d = inside / std::pow(2 * r, kS);
            if (which == Extremum::min ? d < best.density : d > best.density) {
                best = {d, x, r};
            }
        }
    }
    return best;
}

} // namespace

TEST_CASE("density")
{
    CHECK(density(1.0, 1.0, kS) == doctest::Approx(1.0 / 3).epsilon(1e-14));
    CHECK(density(1.0 / 3, 0.5, kS) == doctest::Approx(1.0 / 3).epsilon(1e-14));
    CHECK(density(5.0 / 9, 0.5, kS) == doctest::Approx(5.0 / 9).epsilon(1e-14));
    CHECK_THROWS_AS(density(1.0, 0.0, kS), DomainError);
    CHECK_THROWS_AS(density(1.0, -1.0, kS), DomainError);
}

TEST_CASE("vertex profile")
{
    const auto i2 = build_index(generate_support(gasket_preset(), 2));
    const auto p2 = vertex_profile(i2, 2, 0.4, 0.6);
    REQUIRE(p2.size() == 1);
    CHECK(p2[0].radius == 0.5);
    CHECK(p2[0].theta_open == doctest::Approx(1.0 / 9).epsilon(1e-14));
    CHECK(p2[0].theta_closed == doctest::Approx(5.0 / 9).epsilon(1e-14));

    const auto i1 = build_index(generate_support(gasket_preset(), 1));
    const auto p1 = vertex_profile(i1, 1, 0.5, 1.0);
    REQUIRE(p1.size() == 1);
    CHECK(p1[0].radius == 1.0);
    CHECK(p1[0].theta_open == doctest::Approx(1.0 / 9).epsilon(1e-14));
    CHECK(p1[0].theta_closed == doctest::Approx(1.0 / 3).epsilon(1e-14));

    CHECK(vertex_profile(i2, 2, 0.1, 0.2).empty());
    CHECK_THROWS_AS(vertex_profile(i2, 3, 0.1, 0.2), LevelMismatchError);
}

TEST_CASE("vertex extremes at k = 6 enclose the k = 14 estimates")
{
    const auto idx = build_index(generate_support(gasket_preset(), 6));
    const auto v = vertex_extremes(idx, 6);
    CHECK(v.min.lower <= 0.299714);
    CHECK(v.min.upper >= 0.299714);
    CHECK(v.max.lower <= 0.356687);
    CHECK(v.max.upper >= 0.356687);
    CHECK(v.min.certified());
    CHECK(v.max.certified());

    const auto i1 = build_index(generate_support(gasket_preset(), 1));
    CHECK_THROWS_AS(vertex_extremes(i1, 1), DomainError);
}

TEST_CASE("vertex extremes match a direct radius sweep")
{
    for (int k : {5, 8}) {
        const auto m = generate_support(gasket_preset(), k);
        const auto idx = build_index(m);
        const auto v = vertex_extremes(idx, k);
        double lo = 1e300, hi = -1;
        const double dmin = 0.5 - std::ldexp(1.0, -k);
        for (const auto& t : m.atoms()) {
            const double d = t.point.to_vector().norm();
            if (d < dmin || d > 1.0) {
                continue;
            }
            double open = 0, closed = 0;
            for (std::size_t i = 0; i < m.size(); ++i) {
                const double e = m.atoms()[i].point.to_vector().norm();
                open += e < d - 1e-12 ? m.weight(i) : 0.0;
                closed += e <= d + 1e-12 ? m.weight(i) : 0.0;
            }
            lo = std::min(lo, open / std::pow(2 * d, kS));
            hi = std::max(hi, closed / std::pow(2 * d, kS));
        }
        CHECK(v.min.value == doctest::Approx(lo).epsilon(1e-12));
        CHECK(v.max.value == doctest::Approx(hi).epsilon(1e-12));
        CHECK(v.min.lower <= v.min.value);
        CHECK(v.max.upper >= v.max.value);
    }
}

TEST_CASE("typical-ball search agrees with exhaustive enumeration")
{
    for (int k : {5, 6}) {
        const auto m = generate_support(gasket_preset(), k);
        const auto idx = build_index(m);
        for (Extremum which : {Extremum::min, Extremum::max}) {
            const auto t = typical_ball_extremes(idx, k, gasket_preset().open_sets(), which);
            const auto b = brute_typical(m, which, TypicalSearchOptions{}.min_radius);
            CHECK(t.density.value == doctest::Approx(b.density).epsilon(1e-12));
            CHECK(t.measure.value == doctest::Approx(1.0 / b.density).epsilon(1e-12));
            CHECK(t.measure.witness_radius >= TypicalSearchOptions{}.min_radius);
        }
    }
}

TEST_CASE("search results are independent of the worker count")
{
    const auto idx = build_index(generate_support(gasket_preset(), 7));
    TypicalSearchOptions one, four;
    one.threads = 1;
    four.threads = 4;
    for (Extremum which : {Extremum::min, Extremum::max}) {
        const auto a = typical_ball_extremes(idx, 7, gasket_preset().open_sets(), which, one);
        const auto b = typical_ball_extremes(idx, 7, gasket_preset().open_sets(), which, four);
        CHECK(a.measure.value == b.measure.value);
        CHECK(a.measure.witness_point == b.measure.witness_point);
        CHECK(a.measure.witness_key == b.measure.witness_key);
        CHECK(a.balls_examined == b.balls_examined);
    }
}

TEST_CASE("balls inside a first-level image repeat a coarser ball")
{
    // B inside f_i(O) carries exactly the units of f_i^-1(B) under mu_(k-1)
    const int k = 8;
    const auto fine = build_index(generate_support(gasket_preset(), k));
    const auto coarse = build_index(generate_support(gasket_preset(), k - 1));
    const auto& sets = gasket_preset().open_sets();
    const std::int64_t t[3][2] = {{0, 0}, {1 << (k - 1), 0}, {1 << (k - 2), 1 << (k - 2)}};
    std::mt19937_64 rng(17);
    int tested = 0;
    for (int n = 0; n < 4000 && tested < 300; ++n) {
        const auto& e = fine.entries()[rng() % fine.atom_count()];
        const int i = int(rng() % 3);
        const auto& o = sets[rng() % sets.size()];
        // preimage centre on level k-1 carries the same integers minus the translation
        const LatticePoint pre{e.p - t[i][0], e.q - t[i][1], k - 1};
        const auto kmax = o.max_inscribed_key(pre);
        if (!kmax || *kmax < 1) {
            continue;
        }
        const std::int64_t key = 1 + std::int64_t(rng() % std::uint64_t(*kmax));
        for (BallMode mode : {BallMode::open, BallMode::closed}) {
            CHECK(ball_units(fine, Ball::lattice({e.p, e.q, k}, key, mode)) ==
                  ball_units(coarse, Ball::lattice(pre, key, mode)));
        }
        ++tested;
    }
    CHECK(tested == 300);
}

TEST_CASE("packing factors")
{
    CHECK(packing_upper_factor(14, kS) * 1.668305 == doctest::Approx(1.671292).epsilon(1e-6));
    CHECK(packing_upper_factor(14, kS) > 1.0);
    CHECK(packing_lower_factor(14, kS) < 1.0);
    CHECK(std::isinf(packing_upper_factor(4, kS)));
}

TEST_CASE("typical search errors")
{
    const auto idx = build_index(generate_support(gasket_preset(), 5));
    CHECK_THROWS_AS(typical_ball_extremes(idx, 5, {}, Extremum::min), ParameterError);
    CHECK_THROWS_AS(typical_ball_extremes(idx, 6, gasket_preset().open_sets(), Extremum::min), LevelMismatchError);
    const auto i3 = build_index(generate_support(gasket_preset(), 3));
    CHECK_THROWS_AS(typical_ball_extremes(i3, 3, gasket_preset().open_sets(), Extremum::min), DomainError);
    TypicalSearchOptions huge;
    huge.min_radius = 0.9;
    CHECK_THROWS_AS(typical_ball_extremes(idx, 5, gasket_preset().open_sets(), Extremum::min, huge),
                    EmptySearchError);
}

namespace {

VertexExtremes table_vertex()
{
    VertexExtremes v;
    v.min = measure_estimate("vertex_min", 14, 0.299714, 0.299656, 0.299763, true, true);
    v.max = measure_estimate("vertex_max", 14, 0.356687, 0.356645, 0.356756, true, true);
    return v;
}

const BoundedEstimate kP = measure_estimate("packing", 14, 1.668305, 1.667178, 1.671292, true, true);
const BoundedEstimate kC = measure_estimate("centred", 14, 1.004903, 1.003109, 1.005611, true, true);

} // namespace

TEST_CASE("spectrum of mu")
{
    const auto r = assemble_spectrum(table_vertex(), kP, kC, AlphaMass::natural());
    CHECK(r.disjoint);
    CHECK(r.disjoint_certified);
    CHECK(r.vertex_estimate.lo == doctest::Approx(0.299714));
    CHECK(r.typical_estimate.lo == doctest::Approx(1 / 1.668305));
    CHECK(r.typical_estimate.hi == doctest::Approx(1 / 1.004903));
    CHECK(r.typical_inner.lo == doctest::Approx(1 / 1.667178));
    CHECK(r.typical_outer.lo == doctest::Approx(1 / 1.671292));
    CHECK(r.vertex_inner.lo <= r.vertex_inner.hi);
    CHECK(r.vertex_outer.lo <= r.vertex_estimate.lo);
}

TEST_CASE("spectra of the packing and centred measures")
{
    const auto p = assemble_spectrum(table_vertex(), kP, kC, AlphaMass::packing());
    CHECK(p.typical_estimate.lo == 1.0);
    CHECK(p.typical_inner.lo == 1.0);
    CHECK(p.typical_estimate.hi == doctest::Approx(1.668305 / 1.004903));
    CHECK(p.vertex_inner.lo == doctest::Approx(1.671292 * 0.299763));
    CHECK(p.vertex_outer.hi == doctest::Approx(1.671292 * 0.356756));

    const auto c = assemble_spectrum(table_vertex(), kP, kC, AlphaMass::centred());
    CHECK(c.typical_estimate.hi == 1.0);
    CHECK(c.typical_outer.lo == doctest::Approx(1.003109 / 1.671292));

    const auto g = assemble_spectrum(table_vertex(), kP, kC, AlphaMass::given(2.0));
    CHECK(g.vertex_estimate.hi == doctest::Approx(2 * 0.356687));
    CHECK_THROWS_AS(assemble_spectrum(table_vertex(), kP, kC, AlphaMass::given(0.0)), DomainError);
}

TEST_CASE("inconsistent spectrum inputs")
{
    auto v = table_vertex();
    v.min.lower = 0.4;
    CHECK_THROWS_AS(assemble_spectrum(v, kP, kC), InvariantViolationError);
    // 1/P above 1/C
    CHECK_THROWS_AS(assemble_spectrum(table_vertex(), kC, kP), InvariantViolationError);
    auto uncertified = kP;
    uncertified.certified_upper = false;
    const auto r = assemble_spectrum(table_vertex(), uncertified, kC);
    CHECK(r.disjoint);
    CHECK_FALSE(r.disjoint_certified);
}

TEST_CASE("log scale")
{
    CHECK(logscale(0.05, 0.05) == doctest::Approx(0.05).epsilon(1e-15));
    CHECK(logscale(1.0, 0.05) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(logscale(std::sqrt(0.05), 0.05) == doctest::Approx(0.525).epsilon(1e-14));
    CHECK(logscale(0.3, 0.05) < logscale(0.31, 0.05));
    CHECK_THROWS_AS(logscale(0.01, 0.05), DomainError);
    CHECK_THROWS_AS(logscale(1.5, 0.05), DomainError);
}
