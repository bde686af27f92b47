#include <CLI11.hpp>

#include <algorithm>
#include <iostream>
#include <sstream>

#include "selfsim/reports.hpp"

using selfsim::RunConfig;

namespace {

selfsim::EstimateInput parse_triple(const std::string& text, const std::string& flag)
{
    std::istringstream in(text);
    selfsim::EstimateInput e;
    char c1 = 0, c2 = 0;
    if (!(in >> e.value >> c1 >> e.lower >> c2 >> e.upper) || c1 != ',' || c2 != ',' || !(in >> std::ws).eof()) {
        throw selfsim::ParameterError(flag + " expects value,lower,upper");
    }
    return e;
}

void common(CLI::App* cmd, RunConfig& c)
{
    cmd->add_option("--k", c.k, "approximation level")->capture_default_str();
    cmd->add_option("--out", c.out, "output file (default: standard output)");
    cmd->add_option("--format", c.format, "csv or json")
        ->transform(CLI::CheckedTransformer(std::map<std::string, selfsim::Format>{{"csv", selfsim::Format::csv},
                                                                                    {"json", selfsim::Format::json}}));
}

void open_sets(CLI::App* cmd, RunConfig& c)
{
    cmd->add_option("--open-sets", c.open_sets, "comma separated subset of tri,r0,r1,r2")->delimiter(',');
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Densities, spectra and zooms of the Sierpinski gasket measure"};
    app.require_subcommand(1);
    RunConfig c;
    std::string packing, centred;

    auto* gen = app.add_subcommand("gen", "write the support A_k with weights");
    common(gen, c);

    auto* profile = app.add_subcommand("profile", "densities at z0 over candidate radii in [eps, 1]");
    common(profile, c);
    profile->add_option("--eps", c.eps, "lower end of the radius range and of the log scale")->capture_default_str();

    auto* vertex = app.add_subcommand("vertex-extremes", "lower and upper density at z0 with bounds");
    common(vertex, c);

    auto* estimate = app.add_subcommand("estimate", "packing (min) and centred (max) typical-ball search");
    common(estimate, c);
    open_sets(estimate, c);
    estimate->add_option("--which", c.which, "min, max or both")->capture_default_str();
    estimate->add_flag("--allow-large", c.allow_large, "lift the k <= 12 guard");
    estimate->add_option("--min-radius", c.min_radius, "smallest radius searched")->capture_default_str();
    estimate->add_flag("--all-balls", c.all_balls, "also search balls inside a first-level image f_i(O)");

    auto* spectrum = app.add_subcommand("spectrum", "assemble Spec(alpha, S)");
    common(spectrum, c);
    open_sets(spectrum, c);
    spectrum->add_option("--alpha", c.alpha, "natural, packing or centred")
        ->transform(CLI::CheckedTransformer(std::map<std::string, selfsim::AlphaMass::Kind>{
            {"natural", selfsim::AlphaMass::Kind::natural},
            {"packing", selfsim::AlphaMass::Kind::packing},
            {"centred", selfsim::AlphaMass::Kind::centred}}));
    spectrum->add_option("--typical-k", c.typical_k, "level of the typical-ball search")->capture_default_str();
    spectrum->add_option("--packing", packing, "use P as value,lower,upper instead of searching");
    spectrum->add_option("--centred", centred, "use C as value,lower,upper instead of searching");
    spectrum->add_flag("--trust-bounds", c.trust_bounds, "treat supplied bounds as proven");
    spectrum->add_flag("--allow-large", c.allow_large, "lift the k <= 12 guard of the search");
    spectrum->add_option("--min-radius", c.min_radius, "smallest radius searched")->capture_default_str();

    auto* zoom = app.add_subcommand("zoom", "binned distances along a zoom towards a typical ball");
    common(zoom, c);
    zoom->add_option("--seed", c.seed, "seed of the code of y")->capture_default_str();
    zoom->add_option("--j-max", c.j_max, "longest prefix")->capture_default_str();
    zoom->add_option("--grid", c.grid, "bins per side")->capture_default_str();
    zoom->add_flag("--self", c.self_zoom, "zoom at z0 along its own code towards B(z0, sqrt(92)/16)");
    zoom->add_option("--x", c.center_x, "target centre x")->capture_default_str();
    zoom->add_option("--y", c.center_y, "target centre y")->capture_default_str();
    zoom->add_option("--radius", c.radius, "target radius")->capture_default_str();

    auto* verify = app.add_subcommand("verify", "property suites; per-sample sandwich records go to --out");
    common(verify, c);
    verify->add_option("--suite", c.suite, "all or one suite name")->capture_default_str();
    verify->add_option("--seed", c.seed, "seed of the random samples")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    try {
        auto* sub = app.get_subcommands().front();
        c.command = selfsim::parse_command(sub->get_name());
        if (sub->count("--format") == 0) {
            const bool table = c.command == selfsim::Command::gen || c.command == selfsim::Command::profile ||
                               c.command == selfsim::Command::zoom;
            c.format = table ? selfsim::Format::csv : selfsim::Format::json;
        }
        if (!packing.empty()) {
            c.packing = parse_triple(packing, "--packing");
        }
        if (!centred.empty()) {
            c.centred = parse_triple(centred, "--centred");
        }
        if (verify->parsed() && c.suite != "all") {
            const auto& names = selfsim::suite_names();
            if (std::find(names.begin(), names.end(), c.suite) == names.end()) {
                throw selfsim::ParameterError("unknown suite '" + c.suite + "'");
            }
        }
        return selfsim::run(c, std::cout);
    } catch (const selfsim::ResourceError& e) {
        std::cerr << e.what() << '\n';
        return 3;
    } catch (const selfsim::ParameterError& e) {
        std::cerr << e.what() << '\n';
        return 2;
    } catch (const selfsim::DomainError& e) {
        std::cerr << e.what() << '\n';
        return 2;
    } catch (const selfsim::InvalidGeometryError& e) {
        std::cerr << e.what() << '\n';
        return 2;
    } catch (const selfsim::ResolutionError& e) {
        std::cerr << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << e.what() << '\n';
        return 1;
    }
}
