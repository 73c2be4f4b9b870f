// relbill: command-line front end for the experiment drivers.

#include "relbill/harness.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>

namespace {

struct Options {
    std::string config;
    std::string arithmetic;
    std::optional<std::size_t> events;
    std::string out = ".";
    long b_max = 10000;
    double tol = 1e-9;
    double mass = 0;
    double G = relbill::kGravitationalConstant;
};

relbill::ScenarioConfig load(const Options& o) {
    auto cfg = relbill::load_config(o.config);
    if (!o.arithmetic.empty()) cfg.arithmetic = relbill::parse_arithmetic(o.arithmetic, "--arithmetic");
    return cfg;
}

int finish(const relbill::RunResult& r, const Options& o) {
    const bool failed = r.exit_code == relbill::kExitValidation || r.exit_code == relbill::kExitDegenerate;
    (failed ? std::cerr : std::cout) << r.report;
    try {
        relbill::write_artifacts(o.out, r.artifacts);
    } catch (const relbill::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return relbill::kExitValidation;
    }
    return r.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Relativistic billiards: event simulation and mirror-system experiments"};
    app.require_subcommand(1);
    Options o;

    auto with_config = [&](CLI::App* sub) {
        sub->add_option("--config", o.config, "scenario file (JSON)")->required()->check(CLI::ExistingFile);
        sub->add_option("--arithmetic", o.arithmetic, "override the scenario arithmetic")
            ->check(CLI::IsMember({"float", "rational"}));
        sub->add_option("--out", o.out, "output directory");
    };

    auto* simulate = app.add_subcommand("simulate", "event simulation; writes events.csv");
    with_config(simulate);
    simulate->add_option("--events", o.events, "stop after N events");

    auto* mirror = app.add_subcommand("mirror", "reduced trajectory; writes mirror.csv");
    with_config(mirror);
    mirror->add_option("--events", o.events, "number of reduced steps");

    auto* cross = app.add_subcommand("cross-check", "full simulation against the reduced map");
    with_config(cross);
    cross->add_option("--events", o.events, "simulator events to compare")->required();
    cross->add_option("--tol", o.tol, "relative tolerance");

    auto* period = app.add_subcommand("period", "periodicity and cycle time for Delta < 0");
    with_config(period);
    period->add_option("--b-max", o.b_max, "largest period searched")->check(CLI::PositiveNumber);
    period->add_option("--tol", o.tol, "closure tolerance");

    auto* scan = app.add_subcommand("tachyon-scan", "classification of tachyonic collisions over a grid");
    with_config(scan);

    auto* estimate = app.add_subcommand("estimate", "length scale of tachyonic collisions, 2 G m");
    estimate->add_option("--mass", o.mass, "particle mass in kg")->required();
    estimate->add_option("--G", o.G, "gravitational constant in m/kg");
    estimate->add_option("--out", o.out, "output directory");

    auto* render = app.add_subcommand("render", "spacetime diagram; writes spacetime.svg");
    with_config(render);
    render->add_option("--events", o.events, "stop after N events");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : relbill::kExitValidation;
    }

    try {
        if (estimate->parsed()) return finish(relbill::run_estimate(o.mass, o.G), o);
        const auto cfg = load(o);
        if (simulate->parsed()) return finish(relbill::run_simulate(cfg, o.events), o);
        if (mirror->parsed()) return finish(relbill::run_mirror(cfg, o.events), o);
        if (cross->parsed()) return finish(relbill::run_cross_check(cfg, *o.events, o.tol), o);
        if (period->parsed()) return finish(relbill::run_period(cfg, o.b_max, o.tol), o);
        if (scan->parsed()) return finish(relbill::run_tachyon_scan(cfg), o);
        if (render->parsed()) return finish(relbill::run_render(cfg, o.events), o);
    } catch (const relbill::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return relbill::exit_code_for(e.kind());
    }
    return relbill::kExitValidation;
}
