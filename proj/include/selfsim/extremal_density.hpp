#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <string>
#include <vector>

#include "selfsim/ifs.hpp"
#include "selfsim/spatial_query.hpp"

namespace selfsim {

/// mass / (2d)^s
double density(double mass, double d, double s);

struct DensityRecord {
    std::int64_t key = 0; // 4^k d^2
    double radius = 0.0;
    double theta_open = 0.0;
    double theta_closed = 0.0;
};

/// Point estimate with an enclosing interval. `certified_lower/upper` say
/// whether the corresponding bound is a proven enclosure of the limit value.
struct BoundedEstimate {
    std::string kind;
    int k = 0;
    double value = 0.0;
    double lower = 0.0;
    double upper = 0.0;
    bool certified_lower = true;
    bool certified_upper = true;
    double witness_radius = 0.0;
    Eigen::Vector2d witness_center = Eigen::Vector2d::Zero();
    LatticePoint witness_point{};
    std::int64_t witness_key = 0;

    bool certified() const { return certified_lower && certified_upper; }
};

/// Open and closed mu_k-densities at z0 over the candidate radii in [dmin, dmax].
std::vector<DensityRecord> vertex_profile(const GridIndex& idx, int k, double dmin, double dmax);

struct VertexExtremes {
    BoundedEstimate min; // lower density at z0
    BoundedEstimate max; // upper density at z0
};

/// Minimum open and maximum closed mu_k-density at z0 over radii in
/// [1/2 - 2^-k, 1], each with its certified enclosure of the true value.
VertexExtremes vertex_extremes(const GridIndex& idx, int k);

enum class Extremum { min, max };

struct TypicalSearchOptions {
    // Smallest radius searched. The packing-bound constant
    // (1 - 2^(5-k)/sqrt(3))^-s corresponds to a 2 * 2^-k perturbation of balls
    // with radius at least sqrt(3)/16.
    double min_radius = 0.10825317547305482; // sqrt(3) / 16
    // Skip balls contained in some f_i(O): they repeat, at a coarser effective
    // resolution, the density of a larger ball in the family.
    bool irreducible_only = true;
    unsigned threads = 0; // 0: SELFSIM_THREADS or hardware
};

struct TypicalExtreme {
    Extremum which = Extremum::min;
    BoundedEstimate measure;  // P_k (min) or C_k (max)
    BoundedEstimate density;  // 1 / measure with the reciprocal bounds
    std::uint64_t balls_examined = 0;
    std::string open_set;     // name of an open set containing the optimal ball
};

/// Extremal mu_k-density over typical balls centred at A_k points with radii
/// equal to distances to A_k points: open balls for the minimum, closed balls
/// for the maximum. Returns the corresponding measure estimate.
TypicalExtreme typical_ball_extremes(const GridIndex& idx, int k, const std::vector<ConvexPolygon>& open_sets,
                                     Extremum which, const TypicalSearchOptions& options = {});

/// (1 - 2^(5-k)/sqrt(3))^-s, the certified factor for the packing upper bound.
double packing_upper_factor(int k, double s);
/// (1 + 2^(5-k)/sqrt(3))^-s, the mirrored factor (not a proven bound).
double packing_lower_factor(int k, double s);

/// Estimate of a measure value (P or C) from externally supplied numbers.
BoundedEstimate measure_estimate(std::string kind, int k, double value, double lower, double upper,
                                 bool certified_lower, bool certified_upper);

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
};

/// Total mass alpha(S) used to rescale Spec(mu, S). For the packing and centred
/// measures alpha(S) is the unknown P or C itself, so their bounds enter the
/// intervals and the matching typical endpoint is exactly 1.
struct AlphaMass {
    enum class Kind { natural, packing, centred, given };
    Kind kind = Kind::natural;
    double value = 1.0; // used for Kind::given

    static AlphaMass natural() { return {}; }
    static AlphaMass packing() { return {Kind::packing, 0.0}; }
    static AlphaMass centred() { return {Kind::centred, 0.0}; }
    static AlphaMass given(double v) { return {Kind::given, v}; }
};

std::string to_string(AlphaMass::Kind kind);

struct SpectrumReport {
    BoundedEstimate vertex_lower; // lower density at z0
    BoundedEstimate vertex_upper; // upper density at z0
    BoundedEstimate typical_lower; // 1 / P
    BoundedEstimate typical_upper; // 1 / C
    AlphaMass::Kind alpha = AlphaMass::Kind::natural;
    Interval alpha_mass{1.0, 1.0}; // enclosure of alpha(S)
    double alpha_value = 1.0;
    Interval vertex_estimate, typical_estimate;
    Interval vertex_inner, typical_inner; // contained in the spectrum
    Interval vertex_outer, typical_outer; // contain the spectrum
    bool disjoint = false;           // upper vertex bound below the lower typical bound
    bool disjoint_certified = false; // and both bounds are proven
};

/// Spec(alpha, S) as the union of the vertex interval and the typical-ball
/// interval. `packing` and `centred` are the P and C estimates.
SpectrumReport assemble_spectrum(const VertexExtremes& vertex, const BoundedEstimate& packing,
                                 const BoundedEstimate& centred, const AlphaMass& alpha = {});

/// eps + (eps - 1) / log(eps) * (log d - log eps)
double logscale(double d, double eps);

} // namespace selfsim
