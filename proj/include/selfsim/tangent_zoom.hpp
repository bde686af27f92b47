#pragma once

#include <Eigen/Geometry>

#include <cstdint>
#include <span>
#include <vector>

#include "selfsim/ifs.hpp"
#include "selfsim/lattice_measure.hpp"
#include "selfsim/spatial_query.hpp"

namespace selfsim {

struct ZoomStep {
    Word word;              // first j digits of the code of y
    double scale = 1.0;     // 2^-j
    LatticePoint center{};  // f_word^-1(y), centre of the pulled-back ball
    DiscreteMeasure pulled_back;
    double distance = 0.0;  // binned distance to mu_k restricted to the target
};

struct ZoomOptions {
    int grid = 64;
    // Reject targets that are not typical balls for any of `open_sets`.
    bool require_typical = false;
    std::vector<ConvexPolygon> open_sets;
};

/// For j = 0..j_max, restricts mu_k to B(y, d 2^-j) where y is the A_k point
/// coded by y_code, pulls it back through f_word^-1 (so it lives on
/// B(T^j y, d)) with weights times 3^j, and compares it with mu_k restricted to
/// the target ball. A target with a lattice radius at level l is zoomed
/// exactly and allows j_max <= k - l.
std::vector<ZoomStep> zoom_sequence(const GridIndex& idx, const Ball& target, std::span<const std::uint8_t> y_code,
                                    int j_max, const ZoomOptions& options = {});

/// f_w(0) for the gasket maps as a point of level `level`; needs |w| < level.
LatticePoint gasket_word_origin(const Word& w, int level);

/// Digits from a fixed-seed generator, reproducible across platforms.
std::vector<std::uint8_t> pseudo_random_code(std::uint64_t seed, std::size_t length);

/// Sum over the n x n cells of `box` of |a(cell) - b(cell)| after both
/// measures are normalised to unit mass. Atoms on the upper edges fall in the
/// last row or column.
double binned_tv_distance(const DiscreteMeasure& a, const DiscreteMeasure& b, int n,
                          const Eigen::AlignedBox2d& box);
/// Same on the bounding box of both supports.
double binned_tv_distance(const DiscreteMeasure& a, const DiscreteMeasure& b, int n);

} // namespace selfsim
