#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "selfsim/extremal_density.hpp"
#include "selfsim/tangent_zoom.hpp"
#include "selfsim/verify.hpp"

namespace selfsim {

enum class Command { gen, profile, vertex_extremes, estimate, spectrum, zoom, verify };
enum class Format { csv, json };

inline constexpr int kEstimateGuard = 12;

struct EstimateInput {
    double value = 0.0;
    double lower = 0.0;
    double upper = 0.0;
};

struct RunConfig {
    Command command = Command::gen;
    int k = 8;
    double eps = 0.05;
    std::vector<std::string> open_sets = {"tri", "r0", "r1", "r2"};
    AlphaMass::Kind alpha = AlphaMass::Kind::natural;
    std::string out; // empty: standard output
    Format format = Format::csv;
    std::uint64_t seed = 0;

    // estimate
    std::string which = "both"; // min, max or both
    bool allow_large = false;
    double min_radius = TypicalSearchOptions{}.min_radius;
    bool all_balls = false; // keep balls lying inside some f_i(O)

    // spectrum
    int typical_k = 10;
    std::optional<EstimateInput> packing, centred;
    bool trust_bounds = false; // treat supplied P/C bounds as proven

    // zoom
    int j_max = 6;
    int grid = 64;
    bool self_zoom = false;
    double center_x = 0.5, center_y = 0.0, radius = 0.16;

    // verify
    std::string suite = "all";
};

Command parse_command(const std::string& name);
std::string command_name(Command c);
std::vector<ConvexPolygon> select_open_sets(const std::vector<std::string>& names);

/// Executes the command, writing to `config.out` or to `stdout_stream`.
/// Returns 0, or 1 when a verify suite fails. Errors propagate as exceptions.
int run(const RunConfig& config, std::ostream& stdout_stream);

/// Serialises with every floating number at 17 significant digits.
std::string dump17(const nlohmann::json& j);
std::string format17(double x);

nlohmann::json to_json(const BoundedEstimate& e);
nlohmann::json to_json(const SpectrumReport& r);
nlohmann::json to_json(const SandwichRecord& r);
nlohmann::json to_json(const SuiteResult& r);

} // namespace selfsim
