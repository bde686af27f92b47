#include "selfsim/lattice_measure.hpp"

#include <algorithm>
#include <cstdio>
#include <new>
#include <ostream>

namespace selfsim {

DiscreteMeasure::DiscreteMeasure(int level, double unit_mass, std::vector<Atom> atoms)
    : level_(level), unit_mass_(unit_mass), atoms_(std::move(atoms))
{
    for (const auto& a : atoms_) {
        if (a.point.level != level_) {
            throw LevelMismatchError("atom level differs from measure level");
        }
        total_units_ += a.units;
    }
}

namespace {

// Depth-first walk over the triangles f_v(T), |v| <= k-2, in level-k lattice
// units. Each edge midpoint of such a triangle is a distinct point of A_k shared
// by exactly two triangles of generation k-1; the three corners of T are the
// remaining points and belong to one triangle each.
void emit_midpoints(std::int64_t p0, std::int64_t q0, int depth, int k, std::vector<Atom>& out)
{
    const int shift = k - depth - 2;
    const std::int64_t half = std::int64_t(1) << (shift + 1);
    const std::int64_t quarter = std::int64_t(1) << shift;
    out.push_back({{p0 + half, q0, k}, 2});
    out.push_back({{p0 + quarter, q0 + quarter, k}, 2});
    out.push_back({{p0 + half + quarter, q0 + quarter, k}, 2});
    if (depth + 1 <= k - 2) {
        emit_midpoints(p0, q0, depth + 1, k, out);
        emit_midpoints(p0 + half, q0, depth + 1, k, out);
        emit_midpoints(p0 + quarter, q0 + quarter, depth + 1, k, out);
    }
}

} // namespace

DiscreteMeasure generate_support(const IfsSystem2d& system, int k)
{
    if (k < 1 || k > kMaxSupportLevel) {
        throw ResourceError("support level " + std::to_string(k) + " outside [1, " +
                            std::to_string(kMaxSupportLevel) + "]");
    }
    if (!is_gasket(system)) {
        throw UnsupportedSystemError("lattice generation is implemented for the gasket preset only");
    }
    std::vector<Atom> atoms;
    std::uint64_t power = 1;
    for (int i = 0; i < k; ++i) {
        power *= 3;
    }
    try {
        atoms.reserve((power + 3) / 2);
    } catch (const std::bad_alloc&) {
        throw ResourceError("not enough memory for level " + std::to_string(k));
    }
    const std::int64_t side = std::int64_t(1) << k;
    atoms.push_back({{0, 0, k}, 1});
    atoms.push_back({{side, 0, k}, 1});
    atoms.push_back({{side / 2, side / 2, k}, 1});
    if (k >= 2) {
        emit_midpoints(0, 0, 0, k, atoms);
    }
    std::sort(atoms.begin(), atoms.end(), [](const Atom& a, const Atom& b) {
        return a.point.q != b.point.q ? a.point.q < b.point.q : a.point.p < b.point.p;
    });
    return DiscreteMeasure(k, pow3_inverse(k), std::move(atoms));
}

void write_csv(std::ostream& out, const DiscreteMeasure& m)
{
    out << "p,q,level,x,y,weight\n";
    char buf[160];
    for (std::size_t i = 0; i < m.size(); ++i) {
        const auto& a = m.atoms()[i];
        const auto v = a.point.to_vector();
        std::snprintf(buf, sizeof buf, "%lld,%lld,%d,%.17g,%.17g,%.17g\n", (long long)a.point.p,
                      (long long)a.point.q, a.point.level, v.x(), v.y(), m.weight(i));
        out << buf;
    }
}

} // namespace selfsim
