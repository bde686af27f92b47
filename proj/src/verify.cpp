#include "selfsim/verify.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <sstream>

#include "selfsim/extremal_density.hpp"
#include "selfsim/tangent_zoom.hpp"

namespace selfsim {

double unit_uniform(std::uint64_t draw) { return std::ldexp(double(draw >> 11), -53); }

namespace {

class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    double uniform() { return unit_uniform(gen_()); }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    // integer in [lo, hi]; the modulo bias is irrelevant here
    std::int64_t integer(std::int64_t lo, std::int64_t hi) { return lo + std::int64_t(gen_() % std::uint64_t(hi - lo + 1)); }

private:
    std::mt19937_64 gen_;
};

// Uniform point of the closed unit triangle.
Eigen::Vector2d triangle_point(Rng& rng)
{
    double a = rng.uniform();
    double b = rng.uniform();
    if (a + b > 1.0) {
        a = 1.0 - a;
        b = 1.0 - b;
    }
    return a * Eigen::Vector2d(1.0, 0.0) + b * Eigen::Vector2d(0.5, std::sqrt(3.0) / 2.0);
}

class Recorder {
public:
    explicit Recorder(std::string name) { result_.name = std::move(name); }

    template <typename... Args>
    void check(bool ok, Args&&... parts)
    {
        if (ok) {
            record(true, {});
            return;
        }
        std::ostringstream s;
        s.precision(17);
        (s << ... << parts);
        record(false, s.str());
    }

    SuiteResult result() const { return result_; }

private:
    void record(bool ok, const std::string& what)
    {
        ++result_.checks;
        if (!ok) {
            if (result_.failures == 0) {
                result_.first_failure = what;
            }
            ++result_.failures;
        }
    }

    SuiteResult result_;
};

std::uint64_t pow3(int n)
{
    std::uint64_t r = 1;
    for (int i = 0; i < n; ++i) {
        r *= 3;
    }
    return r;
}

SuiteResult mass_suite(const VerifyOptions& o)
{
    Recorder r("mass");
    for (int k = 1; k <= std::min(o.k, 14); ++k) {
        const auto m = generate_support(gasket_preset(), k);
        // Neumaier summation of the individual weights
        double sum = 0.0;
        double carry = 0.0;
        for (std::size_t i = 0; i < m.size(); ++i) {
            const double w = m.weight(i);
            const double t = sum + w;
            carry += std::abs(sum) >= std::abs(w) ? (sum - t) + w : (w - t) + sum;
            sum = t;
        }
        sum += carry;
        r.check(m.total_units() == pow3(k), "k=", k, " total units ", m.total_units());
        r.check(std::abs(sum - 1.0) <= 1e-12, "k=", k, " sum of weights ", sum);
        r.check(std::abs(m.total() - 1.0) <= 1e-12, "k=", k, " total ", m.total());
    }
    return r.result();
}

// Every vertex image f_w(z_j), |w| = k-1, evaluated with the floating maps and
// snapped to the lattice, counted with multiplicity.
std::map<std::pair<std::int64_t, std::int64_t>, std::uint64_t> naive_support(int k)
{
    const auto& sys = gasket_preset();
    std::map<std::pair<std::int64_t, std::int64_t>, std::uint64_t> points;
    const std::uint64_t words = pow3(k - 1);
    const double scale = std::ldexp(1.0, k);
    for (std::uint64_t n = 0; n < words; ++n) {
        Word w;
        std::uint64_t rest = n;
        for (int i = 0; i < k - 1; ++i) {
            w.digits.push_back(std::uint8_t(rest % 3));
            rest /= 3;
        }
        for (const auto& f : sys.maps()) {
            const Eigen::Vector2d x = apply_word(sys, w, f.fixed_point());
            const auto p = std::llround(x.x() * scale);
            const auto q = std::llround(x.y() * scale / std::sqrt(3.0));
            ++points[{q, p}];
        }
    }
    return points;
}

SuiteResult count_suite(const VerifyOptions& o)
{
    Recorder r("count");
    for (int k = 1; k <= std::min(o.k, 8); ++k) {
        const auto m = generate_support(gasket_preset(), k);
        const auto naive = naive_support(k);
        r.check(m.size() == (pow3(k) + 3) / 2, "k=", k, " size ", m.size());
        r.check(naive.size() == m.size(), "k=", k, " naive ", naive.size(), " vs ", m.size());
        bool same = naive.size() == m.size();
        auto it = naive.begin();
        for (std::size_t i = 0; same && i < m.size(); ++i, ++it) {
            const auto& a = m.atoms()[i];
            same = it->first == std::make_pair(a.point.q, a.point.p) && it->second == a.units;
        }
        r.check(same, "k=", k, " atoms differ from the naive multiset");
    }
    return r.result();
}

SuiteResult scaling_suite(const VerifyOptions& o)
{
    Recorder r("scaling");
    const int k = std::clamp(o.k, 1, 13);
    const auto coarse = generate_support(gasket_preset(), k);
    const auto fine = generate_support(gasket_preset(), k + 1);
    const auto ic = build_index(coarse);
    const auto ifn = build_index(fine);
    const double s = gasket_preset().dimension();
    Rng rng(o.seed ^ 0x5ca1e);
    for (int i = 0; i < o.scaling_samples; ++i) {
        double d = 0.0;
        while (d == 0.0) {
            d = rng.uniform();
        }
        const auto uc = ball_units(ic, Ball::real({0.0, 0.0}, d, BallMode::open));
        const auto uf = ball_units(ifn, Ball::real({0.0, 0.0}, d / 2.0, BallMode::open));
        // 3^-(k+1) uf = 3^-k uc / 3
        r.check(uc == uf, "d=", d, " units ", uc, " vs ", uf);
        if (uc > 0) {
            const double tc = density(double(uc) * ic.unit_mass(), d, s);
            const double tf = density(double(uf) * ifn.unit_mass() * 3.0, d, s);
            r.check(std::abs(tc - tf) <= 1e-15 * tc, "d=", d, " densities ", tc, " vs ", tf);
        }
    }
    return r.result();
}

SuiteResult sandwich_suite(const VerifyOptions& o)
{
    Recorder r("sandwich");
    const int kmax = std::clamp(o.k, 2, 10);
    std::vector<GridIndex> indexes;
    std::vector<DiscreteMeasure> measures;
    for (int k = 2; k <= kmax; ++k) {
        measures.push_back(generate_support(gasket_preset(), k));
        indexes.push_back(build_index(measures.back()));
    }
    const auto& sys = gasket_preset();
    Rng rng(o.seed ^ 0xba11);
    for (int i = 0; i < o.sandwich_samples; ++i) {
        const int k = int(rng.integer(2, kmax));
        const int m = int(rng.integer(1, 10));
        const auto& idx = indexes[std::size_t(k - 2)];
        Eigen::Vector2d x;
        if (i % 2 == 0) {
            const auto& e = idx.entries()[std::size_t(rng.integer(0, std::int64_t(idx.atom_count()) - 1))];
            x = LatticePoint{e.p, e.q, k}.to_vector();
        } else {
            x = triangle_point(rng);
        }
        double reach = 0.0;
        for (const auto& f : sys.maps()) {
            reach = std::max(reach, (f.fixed_point() - x).norm());
        }
        const double step = std::ldexp(1.0, -k);
        const double d = rng.uniform(step, reach);
        if (!(d > step)) {
            continue;
        }
        const auto rec = sandwich_check(idx, x, d, k, m);
        if (o.on_sandwich) {
            o.on_sandwich(rec);
        }
        r.check(rec.ok, "x=(", rec.x, ",", rec.y, ") d=", d, " k=", k, " m=", m, " [", rec.l, ",", rec.u, "] vs [",
                rec.L, ",", rec.U, "]");
    }
    return r.result();
}

SuiteResult cylinder_suite(const VerifyOptions& o)
{
    Recorder r("cylinder");
    const auto& sys = gasket_preset();
    std::vector<Ball> balls = {Ball::real({0.0, 0.0}, 0.6, BallMode::closed),
                               Ball::real({0.5, 0.0}, 0.160543, BallMode::open),
                               Ball::real({5.0 / 16.0, std::sqrt(3.0) / 16.0}, 0.145957, BallMode::closed),
                               Ball::lattice({1, 0, 1}, 1, BallMode::closed)};
    Rng rng(o.seed ^ 0xc71);
    for (int i = 0; i < 40; ++i) {
        balls.push_back(Ball::real(triangle_point(rng), rng.uniform(0.01, 1.0), BallMode::closed));
    }
    const int mmax = std::clamp(o.k, 1, 10);
    for (const auto& b : balls) {
        std::vector<CylinderInterval> iv;
        for (int m = 1; m <= mmax; ++m) {
            iv.push_back(measure_interval(sys, b, m));
            const auto& c = iv.back();
            r.check(c.inside + c.boundary + c.outside == pow3(m), "leaf count at m=", m);
            r.check(c.lower <= c.upper, "m=", m, " lower above upper");
        }
        double lo = 0.0;
        double hi = 1.0;
        for (std::size_t m = 1; m < iv.size(); ++m) {
            const auto& a = iv[m - 1];
            const auto& c = iv[m];
            r.check(c.inside >= 3 * a.inside && c.inside + c.boundary <= 3 * (a.inside + a.boundary),
                    "refinement not monotone at m=",
                    m + 1, " for ball at (", b.center.x(), ",", b.center.y(), ") r=", b.radius);
        }
        for (const auto& c : iv) {
            lo = std::max(lo, c.lower);
            hi = std::min(hi, c.upper);
        }
        r.check(lo <= hi, "intervals do not intersect for r=", b.radius);
    }
    return r.result();
}

// Reference ball mass: every atom, no index.
std::uint64_t brute_units(const DiscreteMeasure& m, const Ball& b)
{
    const bool open = b.mode == BallMode::open;
    std::uint64_t units = 0;
    for (const auto& a : m.atoms()) {
        bool in = false;
        if (b.exact) {
            const auto& e = *b.exact;
            const std::int64_t dp = a.point.p - e.center.p;
            const std::int64_t dq = a.point.q - e.center.q;
            const std::int64_t key = dp * dp + 3 * dq * dq;
            if (e.shift == 0) {
                in = open ? key < e.key : key <= e.key;
            } else {
                const long double dist = std::sqrt((long double)key);
                const long double radius = std::sqrt((long double)e.key) + (long double)e.shift;
                in = open ? dist < radius : dist <= radius;
            }
        } else {
            const double d2 = (a.point.to_vector() - b.center).squaredNorm();
            in = open ? d2 < b.radius2() : d2 <= b.radius2();
        }
        if (in) {
            units += a.units;
        }
    }
    return units;
}

SuiteResult brute_suite(const VerifyOptions& o)
{
    Recorder r("brute");
    Rng rng(o.seed ^ 0xb7e);
    for (int k = 1; k <= std::min(o.k, 6); ++k) {
        const auto m = generate_support(gasket_preset(), k);
        const auto idx = build_index(m);
        for (int i = 0; i < o.brute_balls; ++i) {
            const BallMode mode = rng.integer(0, 1) ? BallMode::open : BallMode::closed;
            Ball b;
            switch (i % 3) {
            case 0: {
                const auto& a = m.atoms()[std::size_t(rng.integer(0, std::int64_t(m.size()) - 1))];
                const auto& t = m.atoms()[std::size_t(rng.integer(0, std::int64_t(m.size()) - 1))];
                b = Ball::lattice(a.point, dist2_key(a.point, t.point), mode);
                break;
            }
            case 1: {
                const auto& a = m.atoms()[std::size_t(rng.integer(0, std::int64_t(m.size()) - 1))];
                const std::int64_t key = rng.integer(0, std::int64_t(1) << (2 * k));
                b = Ball::lattice(a.point, key, mode, rng.integer(-1, 1));
                break;
            }
            default:
                b = Ball::real(triangle_point(rng), rng.uniform(0.0, 1.2), mode);
            }
            const auto fast = ball_units(idx, b);
            const auto slow = brute_units(m, b);
            r.check(fast == slow, "k=", k, " ball (", b.center.x(), ",", b.center.y(), ") r=", b.radius, ": ", fast,
                    " vs ", slow);
        }
    }
    return r.result();
}

SuiteResult open_closed_suite(const VerifyOptions& o)
{
    Recorder r("open-closed");
    for (int k = 2; k <= std::min(o.k, 12); ++k) {
        const auto m = generate_support(gasket_preset(), k);
        const auto idx = build_index(m);
        for (const auto& rec : vertex_profile(idx, k, std::ldexp(1.0, -k), 1.0)) {
            r.check(rec.theta_open < rec.theta_closed, "k=", k, " d=", rec.radius);
        }
    }
    return r.result();
}

SuiteResult intervals_suite(const VerifyOptions& o)
{
    Recorder r("intervals");
    std::vector<VertexExtremes> all;
    for (int k = 4; k <= std::min(o.k, 12); ++k) {
        const auto m = generate_support(gasket_preset(), k);
        const auto idx = build_index(m);
        all.push_back(vertex_extremes(idx, k));
        for (const auto* e : {&all.back().min, &all.back().max}) {
            r.check(e->lower <= e->value && e->value <= e->upper, e->kind, " at k=", k, " does not enclose its estimate");
        }
    }
    for (std::size_t i = 0; i < all.size(); ++i) {
        for (std::size_t j = i + 1; j < all.size(); ++j) {
            r.check(std::max(all[i].min.lower, all[j].min.lower) <= std::min(all[i].min.upper, all[j].min.upper),
                    "min intervals at k=", all[i].min.k, " and ", all[j].min.k);
            r.check(std::max(all[i].max.lower, all[j].max.lower) <= std::min(all[i].max.upper, all[j].max.upper),
                    "max intervals at k=", all[i].max.k, " and ", all[j].max.k);
        }
    }
    return r.result();
}

SuiteResult pushforward_suite(const VerifyOptions& o)
{
    Recorder r("pushforward");
    const auto tri = gasket_triangle_interior();
    Rng rng(o.seed ^ 0x9f);
    // A_1 and A_2 lie on the boundaries of the first-level triangles
    for (int k = 3; k <= std::min(o.k, 8); ++k) {
        const auto m = generate_support(gasket_preset(), k);
        const auto fine = generate_support(gasket_preset(), k + 1);
        const auto idx = build_index(m);
        const auto ifn = build_index(fine);
        const std::int64_t offsets[3][2] = {{0, 0}, {std::int64_t(1) << k, 0}, {std::int64_t(1) << (k - 1), std::int64_t(1) << (k - 1)}};
        int done = 0;
        for (int tries = 0; done < o.pushforward_balls && tries < 50 * o.pushforward_balls; ++tries) {
            const auto& a = m.atoms()[std::size_t(rng.integer(0, std::int64_t(m.size()) - 1))];
            const auto kmax = tri.max_inscribed_key(a.point);
            if (!kmax || *kmax < 1) {
                continue;
            }
            const std::int64_t key = rng.integer(1, *kmax);
            const auto units = ball_units(idx, Ball::lattice(a.point, key, BallMode::open));
            // f_i(x) is x/2 + t_i; on level k+1 that is the same integers plus t_i
            const int i = int(rng.integer(0, 2));
            const LatticePoint image{a.point.p + offsets[i][0], a.point.q + offsets[i][1], k + 1};
            const auto image_units = ball_units(ifn, Ball::lattice(image, key, BallMode::open));
            r.check(units == image_units, "k=", k, " f_", i, " image of ball at (", a.point.p, ",", a.point.q,
                    ") key ", key, ": ", image_units, " vs ", units);
            ++done;
        }
        r.check(done == o.pushforward_balls, "k=", k, " found only ", done, " interior balls");
    }
    return r.result();
}

DiscreteMeasure random_measure(Rng& rng, int level)
{
    std::vector<Atom> atoms;
    const int n = int(rng.integer(1, 12));
    for (int i = 0; i < n; ++i) {
        atoms.push_back({{rng.integer(0, 1 << level), rng.integer(0, 1 << (level - 1)), level},
                         std::uint64_t(rng.integer(1, 9))});
    }
    return DiscreteMeasure(level, 1.0 / 9.0, std::move(atoms));
}

SuiteResult tv_suite(const VerifyOptions& o)
{
    Recorder r("tv");
    Rng rng(o.seed ^ 0x7e);
    const Eigen::AlignedBox2d box(Eigen::Vector2d(0.0, 0.0), Eigen::Vector2d(1.0, 1.0));
    for (int i = 0; i < 200; ++i) {
        const int n = int(rng.integer(1, 16));
        const auto a = random_measure(rng, 4);
        const auto b = random_measure(rng, 4);
        const auto c = random_measure(rng, 4);
        const double ab = binned_tv_distance(a, b, n, box);
        const double ba = binned_tv_distance(b, a, n, box);
        const double ac = binned_tv_distance(a, c, n, box);
        const double cb = binned_tv_distance(c, b, n, box);
        r.check(ab == ba, "asymmetric: ", ab, " vs ", ba);
        r.check(ab <= ac + cb + 1e-12, "triangle inequality: ", ab, " > ", ac, " + ", cb);
        r.check(binned_tv_distance(a, a, n, box) == 0.0, "nonzero self distance");
        r.check(ab >= 0.0 && ab <= 2.0, "out of range: ", ab);
    }
    return r.result();
}

SuiteResult zoom_suite(const VerifyOptions& o)
{
    Recorder r("zoom");
    const int k = std::clamp(o.k, 6, 12);
    const auto m = generate_support(gasket_preset(), k);
    const auto idx = build_index(m);
    // B(z0, sqrt(92)/16), about 0.6, zoomed along the code 000... of z0
    const Ball target = Ball::lattice({0, 0, 4}, 92, BallMode::closed);
    const std::vector<std::uint8_t> zeros(std::size_t(k), 0);
    const auto steps = zoom_sequence(idx, target, zeros, k - 4);
    const double source = ball_mass(idx, target);
    r.check(steps.front().distance == 0.0, "identity prefix has distance ", steps.front().distance);
    for (std::size_t j = 1; j < steps.size(); ++j) {
        r.check(steps[j].distance >= steps[j - 1].distance, "distance drops from ", steps[j - 1].distance, " to ",
                steps[j].distance, " at j=", j);
    }
    for (std::size_t j = 0; j < steps.size(); ++j) {
        const double total = steps[j].pulled_back.total();
        r.check(std::isfinite(total) && total >= 0.0 && total <= std::pow(3.0, double(j)) * source + 1e-12,
                "pulled-back mass ", total, " at j=", j);
        r.check(steps[j].scale == std::ldexp(1.0, -int(j)), "scale at j=", j);
    }
    return r.result();
}

SuiteResult typical_suite(const VerifyOptions& o)
{
    Recorder r("typical");
    const int k = std::clamp(o.k, 5, 8);
    const auto m = generate_support(gasket_preset(), k);
    const auto idx = build_index(m);
    const auto& sets = gasket_preset().open_sets();
    for (const Extremum which : {Extremum::min, Extremum::max}) {
        const auto t = typical_ball_extremes(idx, k, sets, which);
        const auto& e = t.measure;
        bool typical = false;
        for (const auto& poly : sets) {
            typical = typical || (poly.name() == t.open_set && ball_in_open_set(poly, e.witness_point, e.witness_key));
        }
        r.check(typical, e.kind, " witness is not inside ", t.open_set);
        r.check(e.lower <= e.value && e.value <= e.upper, e.kind, " bounds do not enclose the estimate");
        const auto rec = sandwich_check(idx, e.witness_center, e.witness_radius, k, std::min(k, 10));
        r.check(rec.ok, e.kind, " optimal ball fails the cylinder cross-check");
    }
    return r.result();
}

} // namespace

const std::vector<std::string>& suite_names()
{
    static const std::vector<std::string> names = {"mass",      "count",     "scaling",     "sandwich",
                                                   "cylinder",  "brute",     "open-closed", "intervals",
                                                   "pushforward", "tv",      "zoom",        "typical"};
    return names;
}

SuiteResult run_suite(const std::string& name, const VerifyOptions& o)
{
    if (o.k < 1 || o.k > kMaxSupportLevel) {
        throw ResourceError("verify level " + std::to_string(o.k) + " outside [1, " + std::to_string(kMaxSupportLevel) +
                            "]");
    }
    using Fn = SuiteResult (*)(const VerifyOptions&);
    static const std::map<std::string, Fn> table = {
        {"mass", mass_suite},           {"count", count_suite},       {"scaling", scaling_suite},
        {"sandwich", sandwich_suite},   {"cylinder", cylinder_suite}, {"brute", brute_suite},
        {"open-closed", open_closed_suite}, {"intervals", intervals_suite}, {"pushforward", pushforward_suite},
        {"tv", tv_suite},               {"zoom", zoom_suite},         {"typical", typical_suite}};
    const auto it = table.find(name);
    if (it == table.end()) {
        throw ParameterError("unknown suite '" + name + "'");
    }
    return it->second(o);
}

} // namespace selfsim
