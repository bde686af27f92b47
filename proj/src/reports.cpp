#include "selfsim/reports.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>

namespace selfsim {

std::string format17(double x)
{
    if (!std::isfinite(x)) {
        return std::isnan(x) ? "NaN" : (x > 0 ? "Infinity" : "-Infinity");
    }
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

namespace {

void dump_into(const nlohmann::json& j, std::string& out)
{
    switch (j.type()) {
    case nlohmann::json::value_t::number_float: {
        const double x = j.get<double>();
        // JSON has no infinities
        out += std::isfinite(x) ? format17(x) : "null";
        break;
    }
    case nlohmann::json::value_t::object: {
        out += '{';
        bool first = true;
        for (const auto& [key, value] : j.items()) {
            if (!first) {
                out += ',';
            }
            first = false;
            out += nlohmann::json(key).dump();
            out += ':';
            dump_into(value, out);
        }
        out += '}';
        break;
    }
    case nlohmann::json::value_t::array: {
        out += '[';
        for (std::size_t i = 0; i < j.size(); ++i) {
            if (i) {
                out += ',';
            }
            dump_into(j[i], out);
        }
        out += ']';
        break;
    }
    default:
        out += j.dump();
    }
}

} // namespace

std::string dump17(const nlohmann::json& j)
{
    std::string out;
    dump_into(j, out);
    return out;
}

Command parse_command(const std::string& name)
{
    static const std::map<std::string, Command> names = {
        {"gen", Command::gen},         {"profile", Command::profile},   {"vertex-extremes", Command::vertex_extremes},
        {"estimate", Command::estimate}, {"spectrum", Command::spectrum}, {"zoom", Command::zoom},
        {"verify", Command::verify}};
    const auto it = names.find(name);
    if (it == names.end()) {
        throw ParameterError("unknown command '" + name + "'");
    }
    return it->second;
}

std::string command_name(Command c)
{
    switch (c) {
    case Command::gen:
        return "gen";
    case Command::profile:
        return "profile";
    case Command::vertex_extremes:
        return "vertex-extremes";
    case Command::estimate:
        return "estimate";
    case Command::spectrum:
        return "spectrum";
    case Command::zoom:
        return "zoom";
    case Command::verify:
        return "verify";
    }
    return "unknown";
}

std::vector<ConvexPolygon> select_open_sets(const std::vector<std::string>& names)
{
    if (names.empty()) {
        throw ParameterError("no open set selected");
    }
    const auto& all = gasket_preset().open_sets();
    std::vector<ConvexPolygon> out;
    for (const auto& n : names) {
        bool found = false;
        for (const auto& poly : all) {
            if (poly.name() == n) {
                out.push_back(poly);
                found = true;
            }
        }
        if (!found) {
            throw ParameterError("unknown open set '" + n + "' (expected tri, r0, r1, r2)");
        }
    }
    return out;
}

nlohmann::json to_json(const BoundedEstimate& e)
{
    return {{"kind", e.kind},
            {"k", e.k},
            {"value", e.value},
            {"lower", e.lower},
            {"upper", e.upper},
            {"certified", e.certified()},
            {"certified_lower", e.certified_lower},
            {"certified_upper", e.certified_upper},
            {"witness", {{"x", e.witness_center.x()}, {"y", e.witness_center.y()}, {"d", e.witness_radius}}}};
}

namespace {

nlohmann::json interval(const Interval& i) { return nlohmann::json::array({i.lo, i.hi}); }

} // namespace

nlohmann::json to_json(const SpectrumReport& r)
{
    return {{"alpha", to_string(r.alpha)},
            {"alpha_mass", interval(r.alpha_mass)},
            {"alpha_value", r.alpha_value},
            {"vertex", {{"estimate", interval(r.vertex_estimate)}, {"inner", interval(r.vertex_inner)},
                        {"outer", interval(r.vertex_outer)}}},
            {"typical", {{"estimate", interval(r.typical_estimate)}, {"inner", interval(r.typical_inner)},
                         {"outer", interval(r.typical_outer)}}},
            {"disjoint", r.disjoint},
            {"disjoint_certified", r.disjoint_certified},
            {"inputs", {{"vertex_min", to_json(r.vertex_lower)}, {"vertex_max", to_json(r.vertex_upper)},
                        {"inverse_packing", to_json(r.typical_lower)}, {"inverse_centred", to_json(r.typical_upper)}}}};
}

nlohmann::json to_json(const SandwichRecord& r)
{
    return {{"x", r.x}, {"y", r.y}, {"d", r.d}, {"k", r.k}, {"m", r.m},
            {"l", r.l}, {"u", r.u}, {"L", r.L}, {"U", r.U}, {"ok", r.ok}};
}

nlohmann::json to_json(const SuiteResult& r)
{
    nlohmann::json j = {{"suite", r.name}, {"checks", r.checks}, {"failures", r.failures}, {"passed", r.passed()}};
    if (!r.first_failure.empty()) {
        j["first_failure"] = r.first_failure;
    }
    return j;
}

namespace {

void check_level(int k, int lo, int hi, const std::string& guard)
{
    if (k < lo) {
        throw ParameterError("--k must be at least " + std::to_string(lo));
    }
    if (k > hi) {
        throw ResourceError(guard + ": k = " + std::to_string(k) + " exceeds " + std::to_string(hi));
    }
}

GridIndex measure_index(int k)
{
    const auto m = generate_support(gasket_preset(), k);
    return build_index(m);
}

TypicalExtreme search(const GridIndex& idx, const RunConfig& c, int k, Extremum which)
{
    TypicalSearchOptions opts;
    opts.min_radius = c.min_radius;
    opts.irreducible_only = !c.all_balls;
    return typical_ball_extremes(idx, k, select_open_sets(c.open_sets), which, opts);
}

nlohmann::json typical_json(const TypicalExtreme& t)
{
    auto j = to_json(t.measure);
    j["density"] = to_json(t.density);
    j["open_set"] = t.open_set;
    j["balls_examined"] = t.balls_examined;
    return j;
}

void run_gen(const RunConfig& c, std::ostream& out)
{
    check_level(c.k, 1, kMaxSupportLevel, "gen level guard");
    const auto m = generate_support(gasket_preset(), c.k);
    if (c.format == Format::csv) {
        write_csv(out, m);
        return;
    }
    nlohmann::json atoms = nlohmann::json::array();
    for (std::size_t i = 0; i < m.size(); ++i) {
        const auto& a = m.atoms()[i];
        const auto x = a.point.to_vector();
        atoms.push_back({{"p", a.point.p}, {"q", a.point.q}, {"x", x.x()}, {"y", x.y()}, {"weight", m.weight(i)}});
    }
    out << dump17({{"level", m.level()}, {"unit_mass", m.unit_mass()}, {"atoms", atoms}}) << '\n';
}

void run_profile(const RunConfig& c, std::ostream& out)
{
    check_level(c.k, 1, kMaxSupportLevel, "profile level guard");
    const auto idx = measure_index(c.k);
    const auto rows = vertex_profile(idx, c.k, c.eps, 1.0);
    if (c.format == Format::json) {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& r : rows) {
            arr.push_back({{"d", r.radius}, {"g_d", logscale(r.radius, c.eps)}, {"theta_open", r.theta_open},
                           {"theta_closed", r.theta_closed}});
        }
        out << dump17({{"k", c.k}, {"eps", c.eps}, {"rows", arr}}) << '\n';
        return;
    }
    out << "d,g_d,theta_open,theta_closed\n";
    for (const auto& r : rows) {
        out << format17(r.radius) << ',' << format17(logscale(r.radius, c.eps)) << ',' << format17(r.theta_open) << ','
            << format17(r.theta_closed) << '\n';
    }
}

void write_estimates_csv(std::ostream& out, const std::vector<BoundedEstimate>& rows)
{
    out << "kind,k,value,lower,upper,certified,x,y,d\n";
    for (const auto& e : rows) {
        out << e.kind << ',' << e.k << ',' << format17(e.value) << ',' << format17(e.lower) << ',' << format17(e.upper)
            << ',' << (e.certified() ? "true" : "false") << ',' << format17(e.witness_center.x()) << ','
            << format17(e.witness_center.y()) << ',' << format17(e.witness_radius) << '\n';
    }
}

void run_vertex(const RunConfig& c, std::ostream& out)
{
    check_level(c.k, 2, kMaxSupportLevel, "vertex-extremes level guard");
    const auto idx = measure_index(c.k);
    const auto v = vertex_extremes(idx, c.k);
    if (c.format == Format::csv) {
        write_estimates_csv(out, {v.min, v.max});
        return;
    }
    out << dump17({{"k", c.k}, {"min", to_json(v.min)}, {"max", to_json(v.max)}}) << '\n';
}

void run_estimate(const RunConfig& c, std::ostream& out)
{
    check_level(c.k, 4, c.allow_large ? kMaxSupportLevel : kEstimateGuard,
                "estimate guard (pass --allow-large to go beyond k = " + std::to_string(kEstimateGuard) + ")");
    if (c.which != "min" && c.which != "max" && c.which != "both") {
        throw ParameterError("--which must be min, max or both");
    }
    const auto idx = measure_index(c.k);
    std::vector<TypicalExtreme> found;
    if (c.which != "max") {
        found.push_back(search(idx, c, c.k, Extremum::min));
    }
    if (c.which != "min") {
        found.push_back(search(idx, c, c.k, Extremum::max));
    }
    if (c.format == Format::csv) {
        std::vector<BoundedEstimate> rows;
        for (const auto& t : found) {
            rows.push_back(t.measure);
        }
        write_estimates_csv(out, rows);
        return;
    }
    if (found.size() == 1) {
        out << dump17(typical_json(found.front())) << '\n';
        return;
    }
    out << dump17({{"k", c.k}, {"packing", typical_json(found[0])}, {"centred", typical_json(found[1])}}) << '\n';
}

BoundedEstimate supplied(const std::string& kind, int k, const EstimateInput& in, bool trusted)
{
    return measure_estimate(kind, k, in.value, in.lower, in.upper, trusted, trusted);
}

void run_spectrum(const RunConfig& c, std::ostream& out)
{
    check_level(c.k, 2, kMaxSupportLevel, "spectrum vertex level guard");
    const auto v = vertex_extremes(measure_index(c.k), c.k);
    BoundedEstimate packing, centred;
    if (!c.packing || !c.centred) {
        check_level(c.typical_k, 4, c.allow_large ? kMaxSupportLevel : kEstimateGuard,
                    "estimate guard for --typical-k (pass --allow-large to go beyond k = " +
                        std::to_string(kEstimateGuard) + ")");
        const auto idx = measure_index(c.typical_k);
        packing = c.packing ? supplied("packing", c.typical_k, *c.packing, c.trust_bounds)
                            : search(idx, c, c.typical_k, Extremum::min).measure;
        centred = c.centred ? supplied("centred", c.typical_k, *c.centred, c.trust_bounds)
                            : search(idx, c, c.typical_k, Extremum::max).measure;
    } else {
        packing = supplied("packing", 0, *c.packing, c.trust_bounds);
        centred = supplied("centred", 0, *c.centred, c.trust_bounds);
    }
    AlphaMass alpha;
    alpha.kind = c.alpha;
    const auto report = assemble_spectrum(v, packing, centred, alpha);
    if (c.format == Format::csv) {
        out << "interval,estimate_lo,estimate_hi,inner_lo,inner_hi,outer_lo,outer_hi\n";
        auto row = [&](const char* name, const Interval& e, const Interval& i, const Interval& o) {
            out << name << ',' << format17(e.lo) << ',' << format17(e.hi) << ',' << format17(i.lo) << ','
                << format17(i.hi) << ',' << format17(o.lo) << ',' << format17(o.hi) << '\n';
        };
        row("vertex", report.vertex_estimate, report.vertex_inner, report.vertex_outer);
        row("typical", report.typical_estimate, report.typical_inner, report.typical_outer);
        return;
    }
    out << dump17(to_json(report)) << '\n';
}

void run_zoom(const RunConfig& c, std::ostream& out)
{
    check_level(c.k, 2, kMaxSupportLevel, "zoom level guard");
    const auto idx = measure_index(c.k);
    std::vector<ZoomStep> steps;
    ZoomOptions opts;
    opts.grid = c.grid;
    if (c.self_zoom) {
        // B(z0, sqrt(92)/16) along the code 000... of z0
        const std::vector<std::uint8_t> zeros(std::size_t(c.k), 0);
        steps = zoom_sequence(idx, Ball::lattice({0, 0, 4}, 92, BallMode::closed), zeros, std::min(c.j_max, c.k - 4),
                              opts);
    } else {
        const auto code = pseudo_random_code(c.seed, std::size_t(std::max(c.j_max, c.k)));
        steps = zoom_sequence(idx, Ball::real({c.center_x, c.center_y}, c.radius, BallMode::closed), code, c.j_max, opts);
    }
    if (c.format == Format::json) {
        nlohmann::json arr = nlohmann::json::array();
        for (std::size_t j = 0; j < steps.size(); ++j) {
            const auto x = steps[j].center.to_vector();
            arr.push_back({{"j", j}, {"scale", steps[j].scale}, {"distance", steps[j].distance},
                           {"center", {x.x(), x.y()}}, {"mass", steps[j].pulled_back.total()}});
        }
        out << dump17({{"k", c.k}, {"seed", c.seed}, {"self", c.self_zoom}, {"steps", arr}}) << '\n';
        return;
    }
    out << "j,scale,distance\n";
    for (std::size_t j = 0; j < steps.size(); ++j) {
        out << j << ',' << format17(steps[j].scale) << ',' << format17(steps[j].distance) << '\n';
    }
}

int run_verify(const RunConfig& c, std::ostream& out, std::ostream& summary)
{
    VerifyOptions opts;
    opts.k = c.k;
    opts.seed = c.seed;
    const bool detail = &out != &summary;
    if (detail) {
        opts.on_sandwich = [&out](const SandwichRecord& r) { out << dump17(to_json(r)) << '\n'; };
    }
    std::vector<std::string> suites;
    if (c.suite == "all") {
        suites = suite_names();
    } else {
        suites.push_back(c.suite);
    }
    int status = 0;
    for (const auto& name : suites) {
        const auto r = run_suite(name, opts);
        summary << dump17(to_json(r)) << '\n';
        if (!r.passed()) {
            status = 1;
        }
    }
    return status;
}

} // namespace

int run(const RunConfig& config, std::ostream& stdout_stream)
{
    if (!(config.eps > 0.0 && config.eps < 1.0)) {
        throw ParameterError("--eps must lie in (0, 1)");
    }
    std::ofstream file;
    std::ostream* out = &stdout_stream;
    if (!config.out.empty()) {
        file.open(config.out, std::ios::binary);
        if (!file) {
            throw ParameterError("cannot write " + config.out);
        }
        out = &file;
    }
    int status = 0;
    switch (config.command) {
    case Command::gen:
        run_gen(config, *out);
        break;
    case Command::profile:
        run_profile(config, *out);
        break;
    case Command::vertex_extremes:
        run_vertex(config, *out);
        break;
    case Command::estimate:
        run_estimate(config, *out);
        break;
    case Command::spectrum:
        run_spectrum(config, *out);
        break;
    case Command::zoom:
        run_zoom(config, *out);
        break;
    case Command::verify:
        // suite summaries go to the terminal, per-sample records to --out
        status = run_verify(config, *out, stdout_stream);
        break;
    }
    out->flush();
    if (!*out) {
        throw ResourceError("write failed");
    }
    return status;
}

} // namespace selfsim
