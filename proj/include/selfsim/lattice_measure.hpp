#pragma once

#include <cmath>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include "selfsim/ifs.hpp"
#include "selfsim/lattice_point.hpp"

namespace selfsim {

inline constexpr int kMaxSupportLevel = 20;

struct Atom {
    LatticePoint point;
    std::uint64_t units = 0; // weight in multiples of the measure's unit mass
};

/// Finitely supported measure on a common lattice level. Weights are integer
/// multiples of `unit_mass`, so merged masses and ball masses stay exact.
class DiscreteMeasure {
public:
    DiscreteMeasure() = default;
    DiscreteMeasure(int level, double unit_mass, std::vector<Atom> atoms);

    int level() const { return level_; }
    double unit_mass() const { return unit_mass_; }
    const std::vector<Atom>& atoms() const { return atoms_; }
    std::size_t size() const { return atoms_.size(); }
    bool empty() const { return atoms_.empty(); }

    std::uint64_t total_units() const { return total_units_; }
    double total() const { return double(total_units_) * unit_mass_; }
    double weight(std::size_t i) const { return double(atoms_[i].units) * unit_mass_; }

private:
    int level_ = 0;
    double unit_mass_ = 0.0;
    std::vector<Atom> atoms_;
    std::uint64_t total_units_ = 0;
};

/// mu_k on A_k: every vertex image f_i(z_j), |i| = k-1, carries 3^-k and
/// coincident points are merged. Atoms are sorted by (q, p).
DiscreteMeasure generate_support(const IfsSystem2d& system, int k);

inline double pow3_inverse(int k) { return std::pow(3.0, -double(k)); }

/// CSV with header p,q,level,x,y,weight.
void write_csv(std::ostream& out, const DiscreteMeasure& m);

} // namespace selfsim
