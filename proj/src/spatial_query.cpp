#include "selfsim/spatial_query.hpp"

#include <algorithm>
#include <cmath>

namespace selfsim {

double LatticeRadius::radius() const
{
    return (std::sqrt(double(key)) + double(shift)) * std::ldexp(1.0, -center.level);
}

LatticeRadius LatticeRadius::at_level(int level) const
{
    if (level < center.level) {
        throw LevelMismatchError("cannot coarsen a lattice ball");
    }
    const int d = level - center.level;
    return {center.at_level(level), key << (2 * d), shift << d};
}

Ball Ball::real(const Eigen::Vector2d& center, double radius, BallMode mode)
{
    if (!(radius >= 0.0)) {
        throw DomainError("ball radius must be nonnegative");
    }
    return {center, radius, mode, std::nullopt};
}

Ball Ball::lattice(const LatticePoint& center, std::int64_t key, BallMode mode, std::int64_t shift)
{
    if (key < 0) {
        throw DomainError("negative squared radius");
    }
    LatticeRadius exact{center, key, shift};
    return {center.to_vector(), std::max(0.0, exact.radius()), mode, exact};
}

GridIndex::GridIndex(const DiscreteMeasure& m, double cell_size)
    : level_(m.level()), unit_mass_(m.unit_mass()), cell_size_(cell_size), total_units_(m.total_units())
{
    if (!(cell_size > 0.0)) {
        throw ParameterError("cell size must be positive");
    }
    if (m.empty()) {
        throw ParameterError("cannot index an empty measure");
    }
    struct Keyed {
        std::int64_t row;
        std::int64_t column;
        Entry entry;
    };
    std::vector<Keyed> keyed;
    keyed.reserve(m.size());
    for (const auto& a : m.atoms()) {
        const Eigen::Vector2d x = a.point.to_vector();
        bounds_.extend(x);
        const auto [column, row] = cell_of(x);
        keyed.push_back({row, column, {a.point.p, a.point.q, a.units}});
    }
    std::sort(keyed.begin(), keyed.end(), [](const Keyed& a, const Keyed& b) {
        if (a.row != b.row) {
            return a.row < b.row;
        }
        if (a.column != b.column) {
            return a.column < b.column;
        }
        return a.entry.q != b.entry.q ? a.entry.q < b.entry.q : a.entry.p < b.entry.p;
    });
    row_min_ = keyed.front().row;
    const std::int64_t rows = keyed.back().row - row_min_ + 1;
    std::vector<std::int64_t> cell_rows;
    entries_.reserve(keyed.size());
    for (std::size_t i = 0; i < keyed.size(); ++i) {
        if (i == 0 || keyed[i].row != keyed[i - 1].row || keyed[i].column != keyed[i - 1].column) {
            if (!cells_.empty()) {
                cells_.back().end = i;
            }
            cells_.push_back({keyed[i].column, i, i});
            cell_rows.push_back(keyed[i].row);
        }
        entries_.push_back(keyed[i].entry);
    }
    cells_.back().end = keyed.size();
    row_start_.assign(std::size_t(rows) + 1, cells_.size());
    for (std::size_t c = cells_.size(); c-- > 0;) {
        row_start_[std::size_t(cell_rows[c] - row_min_)] = c;
    }
    for (std::size_t r = row_start_.size() - 1; r-- > 0;) {
        row_start_[r] = std::min(row_start_[r], row_start_[r + 1]);
    }
}

std::pair<std::int64_t, std::int64_t> GridIndex::cell_of(const Eigen::Vector2d& x) const
{
    return {std::int64_t(std::floor(x.x() / cell_size_)), std::int64_t(std::floor(x.y() / cell_size_))};
}

std::size_t GridIndex::find_cell(std::size_t first, std::size_t last, std::int64_t column) const
{
    auto it = std::lower_bound(cells_.begin() + std::ptrdiff_t(first), cells_.begin() + std::ptrdiff_t(last), column,
                               [](const Cell& c, std::int64_t col) { return c.column < col; });
    return std::size_t(it - cells_.begin());
}

GridIndex build_index(const DiscreteMeasure& m, double cell_size) { return GridIndex(m, cell_size); }

GridIndex build_index(const DiscreteMeasure& m)
{
    return GridIndex(m, std::max(1.0 / 8.0, std::ldexp(1.0, -m.level())));
}

LatticePoint on_index_level(const GridIndex& idx, const LatticePoint& center)
{
    if (center.level > idx.level()) {
        throw LevelMismatchError("center is finer than the indexed measure");
    }
    return center.at_level(idx.level());
}

namespace {

Eigen::AlignedBox2d ball_box(const Eigen::Vector2d& c, double r)
{
    const Eigen::Vector2d e(r, r);
    return {c - e, c + e};
}

} // namespace

namespace {

// Calls fn(entry) for every atom inside the ball.
template <typename Fn>
void for_each_in_ball(const GridIndex& idx, const Ball& b, Fn&& fn)
{
    const bool open = b.mode == BallMode::open;
    if (b.exact) {
        const int level = std::max(idx.level(), b.exact->center.level);
        const LatticeRadius r = b.exact->at_level(level);
        const int up = level - idx.level();
        if (r.shift < 0 && int128(r.shift) * r.shift > r.key) {
            return;
        }
        idx.for_each_near(ball_box(b.center, b.radius), [&](const GridIndex::Entry& e) {
            const std::int64_t dp = (e.p << up) - r.center.p;
            const std::int64_t dq = (e.q << up) - r.center.q;
            const int cmp = compare_sqrt_shift(dp * dp + 3 * dq * dq, r.key, r.shift);
            if (cmp < 0 || (cmp == 0 && !open)) {
                fn(e);
            }
        });
        return;
    }
    const double r2 = b.radius2();
    const double scale = std::ldexp(1.0, -idx.level());
    const double h = std::sqrt(3.0);
    idx.for_each_near(ball_box(b.center, b.radius), [&](const GridIndex::Entry& e) {
        const double dx = double(e.p) * scale - b.center.x();
        const double dy = double(e.q) * h * scale - b.center.y();
        const double d2 = dx * dx + dy * dy;
        if (d2 < r2 || (d2 == r2 && !open)) {
            fn(e);
        }
    });
}

} // namespace

std::uint64_t ball_units(const GridIndex& idx, const Ball& b)
{
    std::uint64_t units = 0;
    for_each_in_ball(idx, b, [&](const GridIndex::Entry& e) { units += e.units; });
    return units;
}

DiscreteMeasure restrict_to_ball(const GridIndex& idx, const Ball& b)
{
    std::vector<Atom> atoms;
    for_each_in_ball(idx, b, [&](const GridIndex::Entry& e) { atoms.push_back({{e.p, e.q, idx.level()}, e.units}); });
    std::sort(atoms.begin(), atoms.end(), [](const Atom& x, const Atom& y) {
        return x.point.q != y.point.q ? x.point.q < y.point.q : x.point.p < y.point.p;
    });
    return DiscreteMeasure(idx.level(), idx.unit_mass(), std::move(atoms));
}

double ball_mass(const GridIndex& idx, const Ball& b) { return double(ball_units(idx, b)) * idx.unit_mass(); }

void radial_shells(const GridIndex& idx, const LatticePoint& center, std::int64_t max_key,
                   std::vector<RadialShell>& out)
{
    out.clear();
    const LatticePoint c = on_index_level(idx, center);
    const double radius = std::sqrt(double(max_key)) * std::ldexp(1.0, -idx.level());
    idx.for_each_near(ball_box(c.to_vector(), radius), [&](const GridIndex::Entry& e) {
        const std::int64_t dp = e.p - c.p;
        const std::int64_t dq = e.q - c.q;
        const std::int64_t key = dp * dp + 3 * dq * dq;
        if (key <= max_key) {
            out.push_back({key, e.units});
        }
    });
    std::sort(out.begin(), out.end(), [](const RadialShell& a, const RadialShell& b) { return a.key < b.key; });
    std::size_t w = 0;
    for (std::size_t i = 0; i < out.size(); ++i) {
        if (w > 0 && out[w - 1].key == out[i].key) {
            out[w - 1].units += out[i].units;
        } else {
            out[w++] = out[i];
        }
    }
    out.resize(w);
}

std::vector<RadialShell> radial_shells(const GridIndex& idx, const LatticePoint& center, std::int64_t max_key)
{
    std::vector<RadialShell> out;
    radial_shells(idx, center, max_key, out);
    return out;
}

std::vector<CandidateRadius> candidate_radii(const GridIndex& idx, const LatticePoint& center, double dmin,
                                             double dmax)
{
    if (dmin > dmax) {
        throw ParameterError("dmin must not exceed dmax");
    }
    const double unit = std::ldexp(1.0, idx.level());
    const double hi = dmax * unit;
    const auto max_key = std::int64_t(std::floor(hi * hi)) + 1;
    std::vector<CandidateRadius> out;
    const double scale = 1.0 / unit;
    for (const auto& shell : radial_shells(idx, center, max_key)) {
        const double r = std::sqrt(double(shell.key)) * scale;
        if (r >= dmin && r <= dmax) {
            out.push_back({shell.key, r});
        }
    }
    return out;
}

} // namespace selfsim
