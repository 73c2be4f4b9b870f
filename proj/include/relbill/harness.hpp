#pragma once

// Experiment drivers behind the command-line tool. Each returns an exit
// status, a text report and the artifacts to write, so they can be tested
// without touching the file system.

#include "relbill/config.hpp"
#include "relbill/csv.hpp"
#include "relbill/spacetime.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace relbill {

enum ExitCode : int { kExitOk = 0, kExitValidation = 1, kExitDegenerate = 2, kExitCrossCheck = 3 };

inline int exit_code_for(ErrorKind kind) {
    return kind == ErrorKind::Validation ? kExitValidation : kExitDegenerate;
}

struct RunResult {
    int exit_code = kExitOk;
    std::string report;
    std::map<std::string, std::string> artifacts;  // file name -> contents
};

/// Writes each artifact to dir/name through a temporary file and a rename,
/// so readers never see a half-written file.
inline void write_artifacts(const std::filesystem::path& dir, const std::map<std::string, std::string>& artifacts) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw Error(ErrorKind::Validation, "cannot create output directory '" + dir.string() + "': " + ec.message());
    for (const auto& [name, contents] : artifacts) {
        const auto target = dir / name;
        const auto tmp = dir / ("." + name + ".tmp");
        {
            std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
            out << contents;
            if (!out) throw Error(ErrorKind::Validation, "cannot write '" + tmp.string() + "'");
        }
        std::filesystem::rename(tmp, target, ec);
        if (ec) throw Error(ErrorKind::Validation, "cannot rename to '" + target.string() + "': " + ec.message());
    }
}

namespace detail {

inline std::string fixed9(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.9f", v);
    return buf;
}

inline std::string sci(double v, int digits = 3) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*e", digits, v);
    return buf;
}

inline RunResult failure(const Error& e) {
    RunResult r;
    r.exit_code = exit_code_for(e.kind());
    r.report = std::string("error: ") + e.what() + "\n";
    return r;
}

template <class F>
RunResult with_arithmetic(Arithmetic a, F&& f) {
    try {
        if (a == Arithmetic::Float) return f(double{});
        return f(Rational{});
    } catch (const Error& e) {
        return failure(e);
    }
}

template <Scalar Real>
BilliardState<Real> initial_state(const ScenarioConfig& cfg) {
    if (cfg.mode == Mode::Mirror) {
        const auto setup = build_mirror_setup<Real>(cfg);
        return to_billiard_state(setup.params, setup.initial);
    }
    return build_general_state<Real>(cfg);
}

template <Scalar Real>
StopCondition<Real> stop_with_override(const ScenarioConfig& cfg, std::optional<std::size_t> events) {
    if (events) {
        StopCondition<Real> s;
        s.max_events = *events;
        if (cfg.stop.t_limit) s.t_limit = config_number<Real>(*cfg.stop.t_limit, "stop.t_limit");
        return s;
    }
    return build_stop<Real>(cfg);
}

/// Worldlines of a run. When no collisions remain the particles coast on for
/// as long as the run lasted, so the outgoing segments are visible.
template <Scalar Real>
std::string diagram(const BilliardState<Real>& initial, const SimulationResult<Real>& run, Direction dir) {
    auto shown = run.final_state;
    if (run.exhausted) {
        Real span = abs_value(Real(shown.t - initial.t));
        if (is_zero(span, Real(1))) span = 1;
        const Real dt = dir == Direction::Forward ? span : Real(-span);
        for (auto& p : shown.particles) p.x += velocity(p) * dt;
        shown.t += dt;
    }
    return render_svg(worldlines(initial, run.log, shown));
}

}  // namespace detail

/// Event simulation of the configured system. Artifacts: events.csv and
/// report.txt, plus spacetime.svg when listed under "outputs".
inline RunResult run_simulate(const ScenarioConfig& cfg, std::optional<std::size_t> events = std::nullopt) {
    return detail::with_arithmetic(cfg.arithmetic, [&]<class Real>(Real) {
        const auto initial = detail::initial_state<Real>(cfg);
        const auto stop = detail::stop_with_override<Real>(cfg, events);
        RunResult r;
        std::ostringstream rep;
        rep << "mode: " << (cfg.mode == Mode::Mirror ? "mirror" : "general") << "\n";
        rep << "arithmetic: " << ScalarTraits<Real>::name << "\n";
        rep << "direction: " << to_string(cfg.direction) << "\n";
        SimulationResult<Real> run;
        try {
            run = simulate(initial, cfg.direction, stop);
        } catch (const Error& e) {
            rep << "error: " << e.what() << "\n";
            r.exit_code = exit_code_for(e.kind());
            r.report = rep.str();
            r.artifacts["report.txt"] = r.report;
            return r;
        }
        std::size_t tachyonic = 0;
        for (const auto& e : run.log) tachyonic += e.tachyonic;
        const auto before = totals(initial);
        const auto after = totals(run.final_state);
        rep << "events: " << run.log.size() << "\n";
        rep << "tachyonic collisions: " << tachyonic << "\n";
        rep << "final time: " << format_scalar(run.final_state.t) << "\n";
        rep << "no further collisions: " << (run.exhausted ? "yes" : "no") << "\n";
        rep << "total E: " << format_scalar(before.E) << " -> " << format_scalar(after.E) << "\n";
        rep << "total P: " << format_scalar(before.P) << " -> " << format_scalar(after.P) << "\n";
        r.report = rep.str();
        r.artifacts["events.csv"] = write_events_csv(run.log, cfg.mode == Mode::Mirror);
        r.artifacts["report.txt"] = r.report;
        if (cfg.outputs.contains("spacetime.svg")) {
            r.artifacts["spacetime.svg"] = detail::diagram(initial, run, cfg.direction);
        }
        return r;
    });
}

/// Reduced trajectory of a mirror configuration (n collisions of particles
/// 1 and 2) with the closed-form analysis of its parameters.
inline RunResult run_mirror(const ScenarioConfig& cfg, std::optional<std::size_t> steps = std::nullopt) {
    return detail::with_arithmetic(cfg.arithmetic, [&]<class Real>(Real) {
        const auto setup = build_mirror_setup<Real>(cfg);
        const std::size_t n = steps ? *steps : cfg.stop.max_events.value_or(30);
        const auto& p = setup.params;
        const auto pd = to_double_params(p);
        RunResult r;
        std::ostringstream rep;
        rep << "mu: " << format_scalar(p.mu) << "\nE_total: " << format_scalar(p.energy)
            << "\nDelta: " << format_scalar(p.delta) << "\n";
        rep << "k (motion constant): " << format_scalar(motion_constant(setup.initial)) << "\n";
        rep << "tachyonic class: " << to_string(classify_tachyonic(p, setup.initial.sigma1)) << "\n";
        const auto fp = fixed_points(pd);
        if (fp.kind == FixedPointKind::Elliptic) {
            rep << "fixed points: " << fp.attractor.real() << " +/- " << fp.attractor.imag() << " i (elliptic)\n";
            rep << "rotation angle: " << rotation_angle(pd) << "\n";
            const auto per = period(pd, to_double(motion_constant(setup.initial)));
            if (per) rep << "period: a=" << per->a << " b=" << per->b << " T=" << per->T << "\n";
            else rep << "period: aperiodic within b_max\n";
        } else {
            rep << "fixed points: attractor " << fp.attractor.real() << " (|f'|=" << fp.derivative_at << "), repeller "
                << fp.repeller.real() << " (|f'|=" << fp.derivative_re << ")\n";
            const auto lv = limit_velocities(pd);
            rep << "limit velocities: past " << lv.past << ", future " << lv.future
                << (lv.zero_speed_bounce ? " (bounce at zero speed: 0+ in the past, 0- in the future)" : "") << "\n";
            const auto lp = limit_products(p, setup.initial);
            rep << "limits of x1 E2: past " << lp.past << ", future " << lp.future << "\n";
        }
        const auto orbit = reduced_trajectory(p, setup.initial, n, 0);
        rep << "steps: " << n << "\n";
        r.report = rep.str();
        r.artifacts["mirror.csv"] = write_mirror_csv(p, orbit);
        r.artifacts["report.txt"] = r.report;
        return r;
    });
}

struct CrossCheckReport {
    std::size_t compared = 0;  // collisions of particles 1 and 2
    double sigma1 = 0, E2 = 0, x1 = 0, t = 0;  // max relative deviations
    std::optional<double> growth_rate;  // per collision, fitted where the deviation is above rounding
    double worst() const { return std::max({sigma1, E2, x1, t}); }
};

/// Full simulation against the reduced map over `events` simulator events.
template <Scalar Real>
CrossCheckReport cross_check(const MirrorParams<Real>& p, const MirrorState<Real>& initial, std::size_t events) {
    CrossCheckReport rep;
    if (events == 0) return rep;
    StopCondition<Real> stop;
    stop.max_events = events;
    const auto run = simulate(to_billiard_state(p, initial), Direction::Forward, stop);
    std::size_t pair_events = 0;
    for (const auto& e : run.log) pair_events += e.left == 0;
    const auto reduced = reduced_trajectory(p, initial, pair_events, 0);
    std::vector<double> per_step;
    std::size_t n = 0;
    for (const auto& e : run.log) {
        if (e.left != 0) continue;
        ++n;
        const auto& s = reduced[n];
        const double ds = relative_difference(to_double(e.post_i.sigma), to_double(s.sigma1));
        const double de = relative_difference(to_double(Real(e.post_j.E())), to_double(s.E2));
        const double dx = relative_difference(to_double(e.x), to_double(s.x1));
        const double dt = relative_difference(to_double(e.t), to_double(s.t));
        rep.sigma1 = std::max(rep.sigma1, ds);
        rep.E2 = std::max(rep.E2, de);
        rep.x1 = std::max(rep.x1, dx);
        rep.t = std::max(rep.t, dt);
        per_step.push_back(ds);
    }
    rep.compared = n;

    // Least-squares slope of log(deviation) before its peak, over the stretch
    // where it is clearly above rounding and still small. After the peak the
    // orbit has left the unstable region and the deviation contracts.
    const auto peak = static_cast<std::size_t>(std::max_element(per_step.begin(), per_step.end()) - per_step.begin());
    std::vector<std::pair<double, double>> pts;
    for (std::size_t i = 0; i < peak; ++i) {
        if (per_step[i] > 1e-13 && per_step[i] < 1e-3) pts.emplace_back(double(i), std::log(per_step[i]));
    }
    if (pts.size() >= 5) {
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        for (auto [x, y] : pts) {
            sx += x;
            sy += y;
            sxx += x * x;
            sxy += x * y;
        }
        const double m = static_cast<double>(pts.size());
        const double den = m * sxx - sx * sx;
        if (den > 0) rep.growth_rate = std::exp((m * sxy - sx * sy) / den);
    }
    return rep;
}

inline RunResult run_cross_check(const ScenarioConfig& cfg, std::size_t events, double tol = 1e-9) {
    return detail::with_arithmetic(cfg.arithmetic, [&]<class Real>(Real) {
        const auto setup = build_mirror_setup<Real>(cfg);
        const auto rep = cross_check(setup.params, setup.initial, events);
        RunResult r;
        std::ostringstream out;
        out << "events: " << events << "\ncompared collisions: " << rep.compared << "\n";
        out << "max relative deviation: sigma1 " << detail::sci(rep.sigma1) << ", E2 " << detail::sci(rep.E2) << ", x1 "
            << detail::sci(rep.x1) << ", t " << detail::sci(rep.t) << "\n";
        if (rep.growth_rate) {
            out << "divergence growth rate per collision: " << detail::sci(*rep.growth_rate, 2) << "\n";
        }
        const bool pass = rep.worst() <= tol;
        out << (pass ? "PASS" : "FAIL") << " (tolerance " << detail::sci(tol, 1) << ")\n";
        r.exit_code = pass ? kExitOk : kExitCrossCheck;
        r.report = out.str();
        r.artifacts["report.txt"] = r.report;
        return r;
    });
}

/// Time between collision 0 and collision b of particles 1 and 2 in the full
/// event simulation.
template <Scalar Real>
Real simulated_cycle_time(const MirrorParams<Real>& p, const MirrorState<Real>& initial, long b) {
    StopCondition<Real> stop;
    stop.max_events = static_cast<std::size_t>(3 * b);
    const auto run = simulate(to_billiard_state(p, initial), Direction::Forward, stop);
    long n = 0;
    for (const auto& e : run.log) {
        if (e.left == 0 && ++n == b) return e.t - initial.t;
    }
    throw Error(ErrorKind::Degenerate, "cycle not completed within " + std::to_string(3 * b) + " events");
}

inline RunResult run_period(const ScenarioConfig& cfg, long b_max = 10000, double tol = 1e-9) {
    return detail::with_arithmetic(cfg.arithmetic, [&]<class Real>(Real) {
        const auto setup = build_mirror_setup<Real>(cfg);
        const auto pd = to_double_params(setup.params);
        if (delta_sign(pd) >= 0) throw Error(ErrorKind::Validation, "period: needs Delta < 0 (mu > E_total^2)");
        const double k = to_double(motion_constant(setup.initial));
        RunResult r;
        std::ostringstream out;
        out << "theta: " << rotation_angle(pd) << "\nk: " << k << "\n";
        const auto per = period(pd, k, b_max, tol);
        if (!per) {
            out << "aperiodic within b_max=" << b_max << "\n";
        } else {
            const double simulated = to_double(simulated_cycle_time(setup.params, setup.initial, per->b));
            out << "a=" << per->a << ", b=" << per->b << ", T=" << per->T << "; simulated " << detail::fixed9(simulated)
                << "\n";
            out << "relative difference: " << detail::sci(relative_difference(per->T, simulated)) << "\n";
        }
        r.report = out.str();
        r.artifacts["report.txt"] = r.report;
        return r;
    });
}

struct TachyonCount {
    std::size_t count = 0;
    std::size_t forward = 0;   // n > 0
    std::size_t backward = 0;  // n < 0
    long first = 0, last = 0;
};

/// Tachyonic collisions of the sigma1 orbit for n in [-steps, steps].
template <Scalar Real>
TachyonCount count_tachyonic(const MirrorParams<Real>& p, const Real& sigma0, std::size_t steps) {
    TachyonCount c;
    auto visit = [&](const Real& s, long n) {
        if (!tachyonic_predicate(s, p)) return;
        if (c.count == 0) c.first = c.last = n;
        c.first = std::min(c.first, n);
        c.last = std::max(c.last, n);
        ++c.count;
        if (n > 0) ++c.forward;
        if (n < 0) ++c.backward;
    };
    visit(sigma0, 0);
    Real s = sigma0;
    for (std::size_t k = 1; k <= steps; ++k) {
        s = reduced_map(s, p);
        visit(s, static_cast<long>(k));
    }
    s = sigma0;
    for (std::size_t k = 1; k <= steps; ++k) {
        s = inverse_map(s, p);
        visit(s, -static_cast<long>(k));
    }
    return c;
}

/// Whether an empirical count matches the classification: none, exactly two
/// at consecutive indices, or tachyonic collisions recurring in both time
/// directions.
inline bool classification_agrees(TachyonClass cls, const TachyonCount& c) {
    switch (cls) {
        case TachyonClass::None: return c.count == 0;
        case TachyonClass::ExactlyTwoConsecutive: return c.count == 2 && c.last == c.first + 1;
        case TachyonClass::InfinitelyMany: return c.count >= 3 && c.forward >= 1 && c.backward >= 1;
    }
    return false;
}

inline RunResult run_tachyon_scan(const ScenarioConfig& cfg) {
    return detail::with_arithmetic(cfg.arithmetic, [&]<class Real>(Real) {
        if (!cfg.scan) throw detail::config_error("scan", "missing");
        const auto& sc = *cfg.scan;
        std::ostringstream csv;
        csv << "# relbill-tachyon-scan v1\n# arithmetic: " << ScalarTraits<Real>::name << ", steps: " << sc.steps << "\n";
        csv << "mu,E_total,sigma1,delta,classification,count,first_n,last_n,agree\n";
        std::size_t points = 0, agree = 0, errors = 0;
        for (std::size_t a = 0; a < sc.mu.size(); ++a) {
            for (std::size_t b = 0; b < sc.E_total.size(); ++b) {
                for (std::size_t c = 0; c < sc.sigma1.size(); ++c) {
                    const Real mu = config_number<Real>(sc.mu[a], "scan.mu[" + std::to_string(a) + "]");
                    const Real e = config_number<Real>(sc.E_total[b], "scan.E_total[" + std::to_string(b) + "]");
                    const Real s = config_number<Real>(sc.sigma1[c], "scan.sigma1[" + std::to_string(c) + "]");
                    const auto p = MirrorParams<Real>::make(mu, e);
                    const auto cls = classify_tachyonic(p, s);
                    ++points;
                    csv << format_scalar(mu) << ',' << format_scalar(e) << ',' << format_scalar(s) << ','
                        << format_scalar(p.delta) << ',' << to_string(cls) << ',';
                    try {
                        const auto cnt = count_tachyonic(p, s, sc.steps);
                        const bool ok = classification_agrees(cls, cnt);
                        agree += ok;
                        csv << cnt.count << ',' << cnt.first << ',' << cnt.last << ',' << ok << '\n';
                    } catch (const Error& err) {
                        ++errors;
                        csv << ",,,0\n";
                    }
                }
            }
        }
        RunResult r;
        std::ostringstream rep;
        rep << "grid points: " << points << "\nagreeing: " << agree << "\norbits hitting a pole: " << errors << "\n";
        r.report = rep.str();
        r.artifacts["tachyon_scan.csv"] = csv.str();
        r.artifacts["report.txt"] = r.report;
        return r;
    });
}

inline constexpr double kGravitationalConstant = 7.4e-28;  // m/kg with c = 1

/// Bound on the scale of tachyonic collisions for Delta = 0: 2 G m.
inline double estimate_tachyonic_scale(double m, double G = kGravitationalConstant) {
    if (!(m > 0)) throw Error(ErrorKind::Validation, "estimate: mass must be positive");
    if (!(G > 0)) throw Error(ErrorKind::Validation, "estimate: G must be positive");
    return 2 * G * m;
}

inline RunResult run_estimate(double m, double G = kGravitationalConstant) {
    try {
        const double L = estimate_tachyonic_scale(m, G);
        RunResult r;
        std::ostringstream out;
        out << "formula: L = 2 G m\n";
        out << "inputs: m = " << detail::sci(m, 2) << " kg, G = " << detail::sci(G, 2) << " m/kg\n";
        out << "L = " << detail::sci(L, 4) << " m\n";
        out << "L = " << detail::sci(L, 1) << " m (2 significant figures)\n";
        r.report = out.str();
        r.artifacts["report.txt"] = r.report;
        return r;
    } catch (const Error& e) {
        return detail::failure(e);
    }
}

/// Spacetime diagram of a simulated scenario.
inline RunResult run_render(const ScenarioConfig& cfg, std::optional<std::size_t> events = std::nullopt) {
    return detail::with_arithmetic(cfg.arithmetic, [&]<class Real>(Real) {
        const auto initial = detail::initial_state<Real>(cfg);
        const auto run = simulate(initial, cfg.direction, detail::stop_with_override<Real>(cfg, events));
        if (run.log.empty()) throw Error(ErrorKind::Validation, "render: the run has no collisions");
        RunResult r;
        r.artifacts["spacetime.svg"] = detail::diagram(initial, run, cfg.direction);
        r.report = "events: " + std::to_string(run.log.size()) + "\n";
        r.artifacts["report.txt"] = r.report;
        return r;
    });
}

}  // namespace relbill
