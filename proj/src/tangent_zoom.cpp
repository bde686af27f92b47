#include "selfsim/tangent_zoom.hpp"

#include <cmath>
#include <random>

namespace selfsim {

LatticePoint gasket_word_origin(const Word& w, int level)
{
    if (int(w.digits.size()) >= level) {
        throw ResolutionError("word of length " + std::to_string(w.digits.size()) + " needs level > " +
                              std::to_string(level));
    }
    LatticePoint t{0, 0, level};
    for (std::size_t i = 0; i < w.digits.size(); ++i) {
        const int shift = level - 2 - int(i);
        switch (w.digits[i]) {
        case 0:
            break;
        case 1:
            t.p += std::int64_t(1) << (shift + 1);
            break;
        case 2:
            // shift is -1 only for the last digit of a word of length level - 1
            if (shift < 0) {
                throw ResolutionError("f_w(0) is not on the requested lattice");
            }
            t.p += std::int64_t(1) << shift;
            t.q += std::int64_t(1) << shift;
            break;
        default:
            throw InvalidWordError("digit " + std::to_string(int(w.digits[i])) + " is not a gasket map");
        }
    }
    return t;
}

std::vector<std::uint8_t> pseudo_random_code(std::uint64_t seed, std::size_t length)
{
    std::mt19937_64 rng(seed);
    std::vector<std::uint8_t> code(length);
    for (auto& d : code) {
        // the generator output is specified by the standard; the distributions are not
        d = std::uint8_t(rng() % 3);
    }
    return code;
}

namespace {

Eigen::AlignedBox2d support_box(const DiscreteMeasure& m)
{
    Eigen::AlignedBox2d box;
    for (const auto& a : m.atoms()) {
        box.extend(a.point.to_vector());
    }
    return box;
}

// Units of m per cell, row-major.
std::vector<std::uint64_t> bin_units(const DiscreteMeasure& m, int n, const Eigen::AlignedBox2d& box)
{
    const Eigen::Vector2d lo = box.min();
    const Eigen::Vector2d size = box.sizes();
    std::vector<std::uint64_t> cells(std::size_t(n) * std::size_t(n), 0);
    for (const auto& a : m.atoms()) {
        const Eigen::Vector2d x = a.point.to_vector();
        if (!box.contains(x)) {
            throw DomainError("measure has an atom outside the binning box");
        }
        auto cell = [&](int axis) {
            if (!(size[axis] > 0.0)) {
                return 0;
            }
            return std::min(n - 1, int(std::floor((x[axis] - lo[axis]) / size[axis] * n)));
        };
        cells[std::size_t(cell(1)) * std::size_t(n) + std::size_t(cell(0))] += a.units;
    }
    return cells;
}

} // namespace

double binned_tv_distance(const DiscreteMeasure& a, const DiscreteMeasure& b, int n, const Eigen::AlignedBox2d& box)
{
    if (n < 1) {
        throw ParameterError("grid size must be at least 1");
    }
    if (a.total_units() == 0 || b.total_units() == 0) {
        throw DegenerateMeasureError("binned distance of a zero measure");
    }
    const auto ca = bin_units(a, n, box);
    const auto cb = bin_units(b, n, box);
    const double na = double(a.total_units());
    const double nb = double(b.total_units());
    double sum = 0.0;
    for (std::size_t i = 0; i < ca.size(); ++i) {
        sum += std::abs(double(ca[i]) / na - double(cb[i]) / nb);
    }
    return std::min(2.0, sum);
}

double binned_tv_distance(const DiscreteMeasure& a, const DiscreteMeasure& b, int n)
{
    Eigen::AlignedBox2d box = support_box(a);
    box.extend(support_box(b));
    return binned_tv_distance(a, b, n, box);
}

namespace {

Eigen::AlignedBox2d ball_box(const Eigen::Vector2d& c, double r)
{
    const Eigen::Vector2d e(r, r);
    return {c - e, c + e};
}

bool is_typical(const Ball& b, const std::vector<ConvexPolygon>& open_sets)
{
    for (const auto& o : open_sets) {
        const bool inside = b.exact && b.exact->shift == 0 ? ball_in_open_set(o, b.exact->center, b.exact->key)
                                                           : ball_in_open_set(o, b.center, b.radius);
        if (inside) {
            return true;
        }
    }
    return false;
}

} // namespace

std::vector<ZoomStep> zoom_sequence(const GridIndex& idx, const Ball& target, std::span<const std::uint8_t> y_code,
                                    int j_max, const ZoomOptions& options)
{
    const int k = idx.level();
    if (target.exact && target.exact->shift != 0) {
        throw InvalidGeometryError("zoom target radius must be a lattice distance or a plain real");
    }
    const int target_level = target.exact ? target.exact->center.level : 0;
    if (!(target.radius > 0.0)) {
        throw InvalidGeometryError("zoom target needs a positive radius");
    }
    if (j_max < 0) {
        throw ParameterError("j_max must be non-negative");
    }
    if (y_code.size() < std::size_t(j_max)) {
        throw ParameterError("code of y is shorter than j_max");
    }
    if (j_max + target_level > k || j_max > k - 1) {
        throw ResolutionError("j_max = " + std::to_string(j_max) + " exceeds the resolution of level " +
                              std::to_string(k) + " for a target of level " + std::to_string(target_level));
    }
    if (target_level > k) {
        throw LevelMismatchError("target centre is finer than the measure");
    }
    if (options.require_typical) {
        if (options.open_sets.empty()) {
            throw ParameterError("typicality check needs open sets");
        }
        if (!is_typical(target, options.open_sets)) {
            throw InvalidGeometryError("target ball is not contained in any configured open set");
        }
    }

    // y on A_k
    const std::size_t y_len = std::min(y_code.size(), std::size_t(k - 1));
    Word y_word;
    y_word.digits.assign(y_code.begin(), y_code.begin() + std::ptrdiff_t(y_len));
    const LatticePoint y = gasket_word_origin(y_word, k);

    const DiscreteMeasure reference = restrict_to_ball(idx, target);
    if (reference.total_units() == 0) {
        throw DegenerateMeasureError("target ball carries no mass");
    }
    const double radius = target.radius;
    const Eigen::AlignedBox2d target_box = ball_box(target.center, radius);

    std::vector<ZoomStep> steps;
    steps.reserve(std::size_t(j_max) + 1);
    for (int j = 0; j <= j_max; ++j) {
        ZoomStep step;
        step.word.digits.assign(y_code.begin(), y_code.begin() + j);
        step.scale = std::ldexp(1.0, -j);
        const LatticePoint origin = gasket_word_origin(step.word, k);

        // B(y, d 2^-j); a lattice radius sqrt(K)/2^l becomes sqrt(K 4^(k-l-j))/2^k
        const Ball zoom = target.exact
                              ? Ball::lattice(y, target.exact->key << (2 * (k - target_level - j)), target.mode)
                              : Ball::real(y.to_vector(), std::ldexp(radius, -j), target.mode);
        const DiscreteMeasure local = restrict_to_ball(idx, zoom);

        std::vector<Atom> atoms;
        atoms.reserve(local.size());
        for (const auto& a : local.atoms()) {
            atoms.push_back({{(a.point.p - origin.p) << j, (a.point.q - origin.q) << j, k}, a.units});
        }
        step.center = {(y.p - origin.p) << j, (y.q - origin.q) << j, k};
        step.pulled_back = DiscreteMeasure(k, local.unit_mass() * std::pow(3.0, double(j)), std::move(atoms));

        Eigen::AlignedBox2d box = target_box;
        box.extend(ball_box(step.center.to_vector(), radius));
        step.distance = step.pulled_back.total_units() == 0
                            ? 2.0
                            : binned_tv_distance(step.pulled_back, reference, options.grid, box);
        steps.push_back(std::move(step));
    }
    return steps;
}

} // namespace selfsim
