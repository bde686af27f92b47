#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <optional>
#include <vector>

#include "selfsim/lattice_measure.hpp"

namespace selfsim {

enum class BallMode { open, closed };

/// Radius (sqrt(key) + shift) / 2^center.level around a lattice center. With
/// shift = 0 the boundary passes through lattice points at squared-distance key.
struct LatticeRadius {
    LatticePoint center;
    std::int64_t key = 0;
    std::int64_t shift = 0;

    double radius() const;
    LatticeRadius at_level(int level) const;
};

struct Ball {
    Eigen::Vector2d center = Eigen::Vector2d::Zero();
    double radius = 0.0;
    BallMode mode = BallMode::closed;
    std::optional<LatticeRadius> exact;

    static Ball real(const Eigen::Vector2d& center, double radius, BallMode mode);
    static Ball lattice(const LatticePoint& center, std::int64_t key, BallMode mode, std::int64_t shift = 0);

    bool is_exact() const { return exact.has_value(); }
    double radius2() const { return radius * radius; }
};

/// Uniform grid over the atoms of a measure. Non-empty cells are stored row by
/// row so memory scales with the support, not with the bounding box.
class GridIndex {
public:
    struct Entry {
        std::int64_t p;
        std::int64_t q;
        std::uint64_t units;
    };

    GridIndex(const DiscreteMeasure& m, double cell_size);

    int level() const { return level_; }
    double unit_mass() const { return unit_mass_; }
    double cell_size() const { return cell_size_; }
    std::uint64_t total_units() const { return total_units_; }
    std::size_t atom_count() const { return entries_.size(); }
    std::size_t bucket_count() const { return cells_.size(); }
    const Eigen::AlignedBox2d& bounds() const { return bounds_; }
    const std::vector<Entry>& entries() const { return entries_; }

    // Calls fn(entry) for every atom whose cell meets the box (a superset of the
    // atoms inside the box).
    template <typename Fn>
    void for_each_near(const Eigen::AlignedBox2d& box, Fn&& fn) const
    {
        if (entries_.empty()) {
            return;
        }
        const auto lo = cell_of(box.min());
        const auto hi = cell_of(box.max());
        const std::int64_t row_lo = std::max(lo.second - 1, row_min_);
        const std::int64_t row_hi = std::min(hi.second + 1, row_min_ + std::int64_t(row_start_.size()) - 2);
        for (std::int64_t row = row_lo; row <= row_hi; ++row) {
            const auto first = row_start_[std::size_t(row - row_min_)];
            const auto last = row_start_[std::size_t(row - row_min_) + 1];
            for (auto c = find_cell(first, last, lo.first - 1); c < last && cells_[c].column <= hi.first + 1; ++c) {
                for (auto e = cells_[c].begin; e < cells_[c].end; ++e) {
                    fn(entries_[e]);
                }
            }
        }
    }

    std::pair<std::int64_t, std::int64_t> cell_of(const Eigen::Vector2d& x) const;

private:
    struct Cell {
        std::int64_t column;
        std::size_t begin;
        std::size_t end;
    };

    std::size_t find_cell(std::size_t first, std::size_t last, std::int64_t column) const;

    int level_ = 0;
    double unit_mass_ = 0.0;
    double cell_size_ = 0.0;
    std::uint64_t total_units_ = 0;
    Eigen::AlignedBox2d bounds_;
    std::vector<Entry> entries_;
    std::vector<Cell> cells_;
    std::int64_t row_min_ = 0;
    std::vector<std::size_t> row_start_; // per row, first cell; one sentinel at the end
};

GridIndex build_index(const DiscreteMeasure& m, double cell_size);
GridIndex build_index(const DiscreteMeasure& m); // default cell for unit-scale balls

/// Number of measure units of the atoms inside the ball (exact).
std::uint64_t ball_units(const GridIndex& idx, const Ball& b);
double ball_mass(const GridIndex& idx, const Ball& b);

/// The indexed measure restricted to the ball, atoms sorted by (q, p).
DiscreteMeasure restrict_to_ball(const GridIndex& idx, const Ball& b);

struct CandidateRadius {
    std::int64_t key; // 4^level * radius^2
    double radius;
};

/// Distinct distances sqrt(key) / 2^level from `center` to support points,
/// restricted to [dmin, dmax] and sorted increasingly.
std::vector<CandidateRadius> candidate_radii(const GridIndex& idx, const LatticePoint& center, double dmin,
                                             double dmax);

/// Atoms at squared-distance key from a center, merged per key and sorted.
struct RadialShell {
    std::int64_t key;
    std::uint64_t units;
};

void radial_shells(const GridIndex& idx, const LatticePoint& center, std::int64_t max_key,
                   std::vector<RadialShell>& out);
std::vector<RadialShell> radial_shells(const GridIndex& idx, const LatticePoint& center, std::int64_t max_key);

/// Brings a lattice center on the index level; throws when it is finer.
LatticePoint on_index_level(const GridIndex& idx, const LatticePoint& center);

} // namespace selfsim
