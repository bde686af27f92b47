#include "selfsim/extremal_density.hpp"

#include <cmath>
#include <limits>

#include "selfsim/detail/parallel.hpp"

namespace selfsim {

double density(double mass, double d, double s)
{
    if (!(d > 0.0)) {
        throw DomainError("density needs a positive radius");
    }
    if (mass < 0.0) {
        throw DomainError("negative mass");
    }
    return mass / std::pow(2.0 * d, s);
}

namespace {

double key_radius(std::int64_t key, int k) { return std::sqrt(double(key)) * std::ldexp(1.0, -k); }

void check_level(const GridIndex& idx, int k)
{
    if (idx.level() != k) {
        throw LevelMismatchError("index holds level " + std::to_string(idx.level()) + ", asked for k = " +
                                 std::to_string(k));
    }
}

std::int64_t ceil_key(double radius, int k)
{
    const double x = radius * std::ldexp(1.0, k);
    return std::int64_t(std::ceil(x * x * (1.0 - 1e-12)));
}

const LatticePoint kOrigin{0, 0, 0};

} // namespace

std::vector<DensityRecord> vertex_profile(const GridIndex& idx, int k, double dmin, double dmax)
{
    check_level(idx, k);
    if (!(dmin > 0.0 && dmin < dmax && dmax <= 1.0)) {
        throw DomainError("profile range must satisfy 0 < dmin < dmax <= 1");
    }
    const double s = gasket_preset().dimension();
    const double hi = dmax * std::ldexp(1.0, k);
    const auto shells = radial_shells(idx, kOrigin, std::int64_t(std::floor(hi * hi)) + 1);
    std::vector<DensityRecord> out;
    std::uint64_t below = 0;
    for (const auto& shell : shells) {
        const double d = key_radius(shell.key, k);
        if (shell.key > 0 && d >= dmin && d <= dmax) {
            out.push_back({shell.key, d, density(double(below) * idx.unit_mass(), d, s),
                           density(double(below + shell.units) * idx.unit_mass(), d, s)});
        }
        below += shell.units;
    }
    return out;
}

VertexExtremes vertex_extremes(const GridIndex& idx, int k)
{
    check_level(idx, k);
    if (k < 2) {
        throw DomainError("vertex extremes need k >= 2");
    }
    const double s = gasket_preset().dimension();
    const std::int64_t half = std::int64_t(1) << (k - 1);
    const std::int64_t key_lo = (half - 1) * (half - 1); // d >= 1/2 - 2^-k
    const std::int64_t key_hi = std::int64_t(1) << (2 * k); // d <= 1
    const auto shells = radial_shells(idx, kOrigin, key_hi);

    double best_min = std::numeric_limits<double>::infinity();
    double best_max = -1.0;
    std::int64_t min_key = 0;
    std::int64_t max_key = 0;
    std::uint64_t below = 0;
    for (const auto& shell : shells) {
        if (shell.key >= key_lo && shell.key > 0) {
            const double d = key_radius(shell.key, k);
            const double open = density(double(below) * idx.unit_mass(), d, s);
            const double closed = density(double(below + shell.units) * idx.unit_mass(), d, s);
            if (open < best_min) {
                best_min = open;
                min_key = shell.key;
            }
            if (closed > best_max) {
                best_max = closed;
                max_key = shell.key;
            }
        }
        below += shell.units;
    }
    if (min_key == 0) {
        throw EmptySearchError("no candidate radius in [1/2 - 2^-k, 1]");
    }

    const LatticePoint z0{0, 0, k};
    VertexExtremes out;
    auto& lo = out.min;
    lo.kind = "vertex_min";
    lo.k = k;
    lo.value = best_min;
    lo.witness_key = min_key;
    lo.witness_radius = key_radius(min_key, k);
    lo.witness_point = z0;
    lo.lower = std::pow(1.0 - std::ldexp(1.0, 1 - k), s) * best_min;
    lo.upper = density(ball_mass(idx, Ball::lattice(z0, min_key, BallMode::open, +1)), lo.witness_radius, s);

    auto& hi = out.max;
    hi.kind = "vertex_max";
    hi.k = k;
    hi.value = best_max;
    hi.witness_key = max_key;
    hi.witness_radius = key_radius(max_key, k);
    hi.witness_point = z0;
    hi.lower = density(ball_mass(idx, Ball::lattice(z0, max_key, BallMode::closed, -1)), hi.witness_radius, s);
    hi.upper = std::pow(1.0 + std::ldexp(1.0, 1 - k), s) * best_max;
    return out;
}

double packing_upper_factor(int k, double s)
{
    const double x = std::ldexp(1.0, 5 - k) / std::sqrt(3.0);
    return x >= 1.0 ? std::numeric_limits<double>::infinity() : std::pow(1.0 - x, -s);
}

double packing_lower_factor(int k, double s)
{
    const double x = std::ldexp(1.0, 5 - k) / std::sqrt(3.0);
    return std::pow(1.0 + x, -s);
}

namespace {

struct Candidate {
    double density = 0.0;
    std::int64_t key = 0;
    std::int64_t p = 0;
    std::int64_t q = 0;
    std::size_t open_set = 0;
    bool valid = false;
};

// Strict order used for the argmin/argmax: better density, then smaller
// radius, then smaller (y, x) center.
bool better(const Candidate& a, const Candidate& b, Extremum which)
{
    if (!b.valid) {
        return a.valid;
    }
    if (!a.valid) {
        return false;
    }
    if (a.density != b.density) {
        return which == Extremum::min ? a.density < b.density : a.density > b.density;
    }
    if (a.key != b.key) {
        return a.key < b.key;
    }
    return a.q != b.q ? a.q < b.q : a.p < b.p;
}

// Largest key K such that the ball of radius sqrt(K)/2^k around c lies in
// some first-level image f_i(O); -1 when there is none. Such a ball is the
// image of the typical ball f_i^-1(B) with twice the radius and the same
// mu-density.
std::int64_t reducible_bound(const LatticePoint& c, const std::vector<ConvexPolygon>& open_sets)
{
    const int k = c.level;
    const std::int64_t offsets[3][2] = {
        {0, 0}, {std::int64_t(1) << (k - 1), 0}, {std::int64_t(1) << (k - 2), std::int64_t(1) << (k - 2)}};
    std::int64_t best = -1;
    for (const auto& t : offsets) {
        const LatticePoint pre{2 * (c.p - t[0]), 2 * (c.q - t[1]), k};
        for (const auto& poly : open_sets) {
            if (const auto bound = poly.max_inscribed_key(pre)) {
                best = std::max(best, *bound / 4);
            }
        }
    }
    return best;
}

} // namespace

TypicalExtreme typical_ball_extremes(const GridIndex& idx, int k, const std::vector<ConvexPolygon>& open_sets,
                                     Extremum which, const TypicalSearchOptions& options)
{
    check_level(idx, k);
    if (k < 4) {
        throw DomainError("typical-ball search needs k >= 4");
    }
    if (open_sets.empty()) {
        throw ParameterError("at least one open set is required");
    }
    const double s = gasket_preset().dimension();
    const std::int64_t key_lo = std::max<std::int64_t>(1, ceil_key(options.min_radius, k));
    const auto& centers = idx.entries();
    const unsigned workers = detail::worker_count(options.threads);
    std::vector<Candidate> best(workers);
    std::vector<std::uint64_t> examined(workers, 0);
    const double unit_mass = idx.unit_mass();
    const double scale = std::ldexp(1.0, -k);

    detail::parallel_chunks(centers.size(), workers, [&](unsigned w, std::size_t begin, std::size_t end) {
        std::vector<RadialShell> shells;
        Candidate local;
        std::uint64_t count = 0;
        for (std::size_t i = begin; i < end; ++i) {
            const LatticePoint c{centers[i].p, centers[i].q, k};
            std::int64_t key_hi = -1;
            std::size_t set = 0;
            for (std::size_t o = 0; o < open_sets.size(); ++o) {
                const auto bound = open_sets[o].max_inscribed_key(c);
                if (bound && *bound > key_hi) {
                    key_hi = *bound;
                    set = o;
                }
            }
            std::int64_t key_from = key_lo;
            if (options.irreducible_only) {
                key_from = std::max(key_from, reducible_bound(c, open_sets) + 1);
            }
            if (key_hi < key_from) {
                continue;
            }
            radial_shells(idx, c, key_hi, shells);
            std::uint64_t below = 0;
            for (const auto& shell : shells) {
                if (shell.key >= key_from) {
                    const double d = std::sqrt(double(shell.key)) * scale;
                    const std::uint64_t units = which == Extremum::min ? below : below + shell.units;
                    Candidate cand{double(units) * unit_mass / std::pow(2.0 * d, s), shell.key, c.p, c.q, set, true};
                    ++count;
                    if (better(cand, local, which)) {
                        local = cand;
                    }
                }
                below += shell.units;
            }
        }
        best[w] = local;
        examined[w] = count;
    });

    Candidate winner;
    std::uint64_t total = 0;
    for (unsigned w = 0; w < workers; ++w) {
        if (better(best[w], winner, which)) {
            winner = best[w];
        }
        total += examined[w];
    }
    if (!winner.valid) {
        throw EmptySearchError("no typical ball found among the configured open sets");
    }

    TypicalExtreme out;
    out.which = which;
    out.balls_examined = total;
    out.open_set = open_sets[winner.open_set].name();
    const LatticePoint center{winner.p, winner.q, k};
    const double value = 1.0 / winner.density;
    const double up = packing_upper_factor(k, s);
    const double down = packing_lower_factor(k, s);
    const bool is_min = which == Extremum::min;
    out.measure = measure_estimate(is_min ? "packing" : "centred", k, value, value * down, value * up, false, is_min);
    for (auto* e : {&out.measure, &out.density}) {
        e->witness_point = center;
        e->witness_center = center.to_vector();
        e->witness_key = winner.key;
        e->witness_radius = key_radius(winner.key, k);
    }
    out.density.kind = is_min ? "packing_density" : "centred_density";
    out.density.k = k;
    out.density.value = winner.density;
    out.density.lower = 1.0 / out.measure.upper;
    out.density.upper = 1.0 / out.measure.lower;
    out.density.certified_lower = out.measure.certified_upper;
    out.density.certified_upper = out.measure.certified_lower;
    return out;
}

BoundedEstimate measure_estimate(std::string kind, int k, double value, double lower, double upper,
                                 bool certified_lower, bool certified_upper)
{
    if (!(lower <= value && value <= upper)) {
        throw InvariantViolationError(kind + " estimate outside its bounds");
    }
    BoundedEstimate e;
    e.kind = std::move(kind);
    e.k = k;
    e.value = value;
    e.lower = lower;
    e.upper = upper;
    e.certified_lower = certified_lower;
    e.certified_upper = certified_upper;
    return e;
}

namespace {

void check_estimate(const BoundedEstimate& e)
{
    if (!(e.lower <= e.value && e.value <= e.upper)) {
        throw InvariantViolationError(e.kind + ": bounds do not enclose the estimate");
    }
    if (!(e.lower > 0.0)) {
        throw InvariantViolationError(e.kind + ": bounds must be positive");
    }
}

BoundedEstimate reciprocal(const BoundedEstimate& e, std::string kind)
{
    BoundedEstimate r = e;
    r.kind = std::move(kind);
    r.value = 1.0 / e.value;
    r.lower = 1.0 / e.upper;
    r.upper = 1.0 / e.lower;
    r.certified_lower = e.certified_upper;
    r.certified_upper = e.certified_lower;
    return r;
}

} // namespace

std::string to_string(AlphaMass::Kind kind)
{
    switch (kind) {
    case AlphaMass::Kind::natural:
        return "natural";
    case AlphaMass::Kind::packing:
        return "packing";
    case AlphaMass::Kind::centred:
        return "centred";
    case AlphaMass::Kind::given:
        return "given";
    }
    return "unknown";
}

SpectrumReport assemble_spectrum(const VertexExtremes& vertex, const BoundedEstimate& packing,
                                 const BoundedEstimate& centred, const AlphaMass& alpha)
{
    for (const auto* e : {&vertex.min, &vertex.max, &packing, &centred}) {
        check_estimate(*e);
    }
    SpectrumReport r;
    r.vertex_lower = vertex.min;
    r.vertex_upper = vertex.max;
    r.typical_lower = reciprocal(packing, "inverse_packing");
    r.typical_upper = reciprocal(centred, "inverse_centred");
    if (r.vertex_lower.value > r.vertex_upper.value || r.typical_lower.value > r.typical_upper.value) {
        throw InvariantViolationError("spectrum interval with lower end above upper end");
    }

    r.alpha = alpha.kind;
    double a = 1.0;
    Interval ab{1.0, 1.0};
    switch (alpha.kind) {
    case AlphaMass::Kind::natural:
        break;
    case AlphaMass::Kind::given:
        if (!(alpha.value > 0.0)) {
            throw DomainError("alpha(S) must be positive");
        }
        a = alpha.value;
        ab = {a, a};
        break;
    case AlphaMass::Kind::packing:
        a = packing.value;
        ab = {packing.lower, packing.upper};
        break;
    case AlphaMass::Kind::centred:
        a = centred.value;
        ab = {centred.lower, centred.upper};
        break;
    }
    r.alpha_value = a;
    r.alpha_mass = ab;

    const auto& lo = r.vertex_lower;
    const auto& hi = r.vertex_upper;
    r.vertex_estimate = {a * lo.value, a * hi.value};
    r.vertex_inner = {ab.hi * lo.upper, ab.lo * hi.lower};
    r.vertex_outer = {ab.lo * lo.lower, ab.hi * hi.upper};

    if (alpha.kind == AlphaMass::Kind::packing) {
        r.typical_estimate = {1.0, packing.value / centred.value};
        r.typical_inner = {1.0, packing.lower / centred.upper};
        r.typical_outer = {1.0, packing.upper / centred.lower};
    } else if (alpha.kind == AlphaMass::Kind::centred) {
        r.typical_estimate = {centred.value / packing.value, 1.0};
        r.typical_inner = {centred.upper / packing.lower, 1.0};
        r.typical_outer = {centred.lower / packing.upper, 1.0};
    } else {
        const auto& tl = r.typical_lower;
        const auto& tu = r.typical_upper;
        r.typical_estimate = {a * tl.value, a * tu.value};
        r.typical_inner = {a * tl.upper, a * tu.lower};
        r.typical_outer = {a * tl.lower, a * tu.upper};
    }
    r.disjoint = hi.upper < r.typical_lower.lower;
    r.disjoint_certified = r.disjoint && hi.certified_upper && r.typical_lower.certified_lower;
    return r;
}

double logscale(double d, double eps)
{
    if (!(eps > 0.0 && eps < 1.0)) {
        throw DomainError("logscale needs 0 < eps < 1");
    }
    if (!(d >= eps && d <= 1.0)) {
        throw DomainError("logscale argument outside [eps, 1]");
    }
    return eps + (eps - 1.0) / std::log(eps) * (std::log(d) - std::log(eps));
}

} // namespace selfsim
