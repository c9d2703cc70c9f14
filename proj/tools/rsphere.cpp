#include "rsphere/app.hpp"

#include "CLI11.hpp"

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace
{

struct Flags
{
    std::optional<std::string> config;
    std::optional<std::string> out;
    std::optional<std::uint64_t> seed;
    std::optional<double> step;
    std::optional<int> fan_n;
    std::optional<bool> svg;
    std::optional<std::string> profile;
    std::optional<double> alpha;
    std::optional<double> lambda;
    std::optional<std::string> preset;
    std::vector<std::string> winds;
    std::optional<double> q_r;
    std::optional<double> q_theta;
    std::optional<double> phi;
    std::optional<double> length;
    std::optional<int> n_grid;
    std::optional<int> grid_n;
};

rsphere::app::RunConfig assemble(const Flags &fl, const std::string &experiment)
{
    using namespace rsphere::app;
    RunConfig cfg;
    if (fl.config)
        cfg = load_config_file(*fl.config);
    if (fl.preset)
        apply_preset(cfg, *fl.preset);
    if (!experiment.empty())
        cfg.experiment = experiment;
    auto set = [](auto &dst, const auto &src) {
        if (src)
            dst = *src;
    };
    set(cfg.out, fl.out);
    set(cfg.seed, fl.seed);
    set(cfg.step, fl.step);
    set(cfg.fan_n, fl.fan_n);
    set(cfg.svg, fl.svg);
    set(cfg.profile, fl.profile);
    set(cfg.alpha, fl.alpha);
    set(cfg.lambda, fl.lambda);
    set(cfg.q_r, fl.q_r);
    set(cfg.q_theta, fl.q_theta);
    set(cfg.phi, fl.phi);
    set(cfg.length, fl.length);
    set(cfg.n_grid, fl.n_grid);
    set(cfg.grid_n, fl.grid_n);
    if (!fl.winds.empty())
        cfg.winds = fl.winds;
    validate(cfg);
    return cfg;
}

} // namespace

int main(int argc, char **argv)
{
    using namespace rsphere::app;
    CLI::App app{"Randers metrics on spheres of revolution: geodesics, conjugate and cut loci"};
    app.set_version_flag("--version", RSPHERE_VERSION);
    Flags fl;
    bool svg_on = false;
    bool svg_off = false;
    bool quiet = false;

    app.add_option("--config", fl.config, "JSON run config");
    app.add_option("--out", fl.out, "output directory");
    app.add_option("--seed", fl.seed, "random seed");
    app.add_option("--step", fl.step, "integration step");
    app.add_option("--fan-n", fl.fan_n, "fan size");
    auto *on = app.add_flag("--svg", svg_on, "write SVG plots");
    app.add_flag("--no-svg", svg_off, "skip SVG plots")->excludes(on);
    app.add_option("--profile", fl.profile, "round | twisted-sine | arcsin-ratio");
    app.add_option("--alpha", fl.alpha, "twisted-sine parameter");
    app.add_option("--lambda", fl.lambda, "arcsin-ratio parameter");
    app.add_option("--preset", fl.preset, "named preset (paper-s4)");
    app.add_option("--wind", fl.winds, "catalog wind id, repeatable, in chain order");
    app.add_option("--q-r", fl.q_r, "source r");
    app.add_option("--q-theta", fl.q_theta, "source theta");
    app.add_option("--phi", fl.phi, "initial angle to the parallel");
    app.add_option("--length", fl.length, "geodesic length");
    app.add_option("--n-grid", fl.n_grid, "half-period grid size");
    app.add_option("--grid-n", fl.grid_n, "curvature / condition grid size");
    app.add_flag("-q,--quiet", quiet, "no summary on stdout");
    app.require_subcommand(0, 1);
    for (const auto &id : experiment_ids())
        app.add_subcommand(id, "run the " + id + " experiment")->fallthrough();

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError &e)
    {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }
    if (svg_on)
        fl.svg = true;
    if (svg_off)
        fl.svg = false;

    std::string experiment;
    for (const auto *sub : app.get_subcommands())
        experiment = sub->get_name();
    if (experiment.empty() && !fl.config)
    {
        std::cerr << "error: give a subcommand or --config\n" << app.help();
        return kExitConfig;
    }

    try
    {
        const RunConfig cfg = assemble(fl, experiment);
        const RunOutcome res = run(cfg);
        if (!quiet)
        {
            for (const auto &c : res.report["checks"])
                std::printf("%s  %s  value=%.3e tol=%.1e\n", c["pass"].get<bool>() ? "pass" : "FAIL",
                            c["name"].get<std::string>().c_str(), c["value"].get<double>(),
                            c["tolerance"].get<double>());
            if (res.report.contains("error"))
                std::fprintf(stderr, "error: %s\n", res.report["error"].get<std::string>().c_str());
            std::printf("%s -> %s/report.json (digest %s, exit %d)\n", cfg.experiment.c_str(), cfg.out.c_str(),
                        res.report["report_digest"].get<std::string>().c_str(), res.exit_code);
        }
        return res.exit_code;
    }
    catch (const ConfigError &e)
    {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kExitConfig;
    }
    catch (const std::exception &e)
    {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitNumeric;
    }
}
