#pragma once

// Scenario files. JSON with nested sections; every number may be written
// as a JSON number or as a string ("1/3", "-1.25", "1.7e-27"). Numbers are
// kept as text until the arithmetic mode is known, so rational runs see the
// literal as written.
//
//   {
//     "mode": "general" | "mirror",
//     "arithmetic": "float" | "rational",
//     "direction": "forward" | "backward",
//     "particles": [ {"E": ..., "P": ... | "v": ..., "mu": ..., "x": ...}, ... ],
//     "mirror": {"mu": ..., "E_total": ..., "sigma1": ..., "x1": ...},
//     "stop": {"max_events": N, "t_limit": ...},
//     "scan": {"mu": [...], "E_total": [...], "sigma1": [...], "steps": N},
//     "outputs": ["events.csv", "spacetime.svg", ...]
//   }

#include "relbill/mirror.hpp"

#include <json.hpp>

#include <charconv>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace relbill {

enum class Arithmetic { Float, Rational };

inline const char* to_string(Arithmetic a) { return a == Arithmetic::Float ? "float" : "rational"; }

inline Arithmetic parse_arithmetic(const std::string& s, const std::string& path = "arithmetic") {
    if (s == "float") return Arithmetic::Float;
    if (s == "rational") return Arithmetic::Rational;
    throw Error(ErrorKind::Validation, path + ": expected 'float' or 'rational', got '" + s + "'");
}

enum class Mode { General, Mirror };

struct ParticleSpec {
    std::string E;
    std::optional<std::string> P;
    std::optional<std::string> v;
    std::optional<std::string> mu;
    std::string x;
};

struct MirrorSpec {
    std::string mu;
    std::string E_total;
    std::string sigma1;
    std::string x1;
};

struct ScanSpec {
    std::vector<std::string> mu;
    std::vector<std::string> E_total;
    std::vector<std::string> sigma1;
    std::size_t steps = 1000;
};

struct StopSpec {
    std::optional<std::size_t> max_events;
    std::optional<std::string> t_limit;
};

struct ScenarioConfig {
    Mode mode = Mode::General;
    Arithmetic arithmetic = Arithmetic::Float;
    Direction direction = Direction::Forward;
    std::vector<ParticleSpec> particles;
    std::optional<MirrorSpec> mirror;
    std::optional<ScanSpec> scan;
    StopSpec stop;
    std::set<std::string> outputs;
};

inline const std::set<std::string>& known_outputs() {
    static const std::set<std::string> names{"events.csv", "mirror.csv", "report.txt", "spacetime.svg"};
    return names;
}

namespace detail {

using Json = nlohmann::json;

inline Error config_error(const std::string& path, const std::string& msg) {
    return Error(ErrorKind::Validation, path + ": " + msg);
}

// Number or numeric string as literal text. JSON floats go through the
// shortest round-trip decimal, which is what the author typed for up to
// 17 significant digits.
inline std::string number_text(const Json& j, const std::string& path) {
    std::string text;
    if (j.is_string()) {
        text = j.get<std::string>();
    } else if (j.is_number_integer()) {
        text = std::to_string(j.get<long long>());
    } else if (j.is_number_unsigned()) {
        text = std::to_string(j.get<unsigned long long>());
    } else if (j.is_number_float()) {
        char buf[64];
        auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, j.get<double>());
        text.assign(buf, ptr);
    } else {
        throw config_error(path, "expected a number");
    }
    try {
        (void)parse_rational(text);
    } catch (const Error& e) {
        throw config_error(path, e.what());
    }
    return text;
}

inline const Json& required(const Json& obj, const char* key, const std::string& path) {
    auto it = obj.find(key);
    if (it == obj.end()) throw config_error(path + "." + key, "missing");
    return *it;
}

inline void reject_unknown(const Json& obj, std::initializer_list<const char*> keys, const std::string& path) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool ok = false;
        for (const char* k : keys) ok = ok || it.key() == k;
        if (!ok) throw config_error(path.empty() ? it.key() : path + "." + it.key(), "unknown key");
    }
}

inline std::vector<std::string> number_list(const Json& j, const std::string& path) {
    if (!j.is_array()) throw config_error(path, "expected a list");
    std::vector<std::string> out;
    for (std::size_t i = 0; i < j.size(); ++i) out.push_back(number_text(j[i], path + "[" + std::to_string(i) + "]"));
    if (out.empty()) throw config_error(path, "empty list");
    return out;
}

inline std::size_t count_value(const Json& j, const std::string& path) {
    if (!j.is_number_integer() && !j.is_number_unsigned()) throw config_error(path, "expected a nonnegative integer");
    if (j.is_number_integer() && j.get<long long>() < 0) throw config_error(path, "expected a nonnegative integer");
    return j.get<std::size_t>();
}

inline std::string string_value(const Json& j, const std::string& path) {
    if (!j.is_string()) throw config_error(path, "expected a string");
    return j.get<std::string>();
}

}  // namespace detail

/// Structural parse; numeric ranges are checked by validate_config.
inline ScenarioConfig parse_config(const std::string& text) {
    using detail::Json;
    Json root;
    try {
        root = Json::parse(text);
    } catch (const Json::parse_error& e) {
        throw Error(ErrorKind::Validation, std::string("config: ") + e.what());
    }
    if (!root.is_object()) throw Error(ErrorKind::Validation, "config: top level must be an object");
    detail::reject_unknown(root, {"mode", "arithmetic", "direction", "particles", "mirror", "stop", "scan", "outputs"},
                           "");

    ScenarioConfig cfg;
    if (auto it = root.find("mode"); it != root.end()) {
        const auto m = detail::string_value(*it, "mode");
        if (m == "general") cfg.mode = Mode::General;
        else if (m == "mirror") cfg.mode = Mode::Mirror;
        else throw detail::config_error("mode", "expected 'general' or 'mirror', got '" + m + "'");
    }
    if (auto it = root.find("arithmetic"); it != root.end()) {
        cfg.arithmetic = parse_arithmetic(detail::string_value(*it, "arithmetic"));
    }
    if (auto it = root.find("direction"); it != root.end()) {
        const auto d = detail::string_value(*it, "direction");
        if (d == "forward") cfg.direction = Direction::Forward;
        else if (d == "backward") cfg.direction = Direction::Backward;
        else throw detail::config_error("direction", "expected 'forward' or 'backward', got '" + d + "'");
    }
    if (auto it = root.find("particles"); it != root.end()) {
        if (!it->is_array()) throw detail::config_error("particles", "expected a list");
        for (std::size_t i = 0; i < it->size(); ++i) {
            const auto& pj = (*it)[i];
            const std::string path = "particles[" + std::to_string(i) + "]";
            if (!pj.is_object()) throw detail::config_error(path, "expected an object");
            detail::reject_unknown(pj, {"E", "P", "v", "mu", "x"}, path);
            ParticleSpec ps;
            ps.E = detail::number_text(detail::required(pj, "E", path), path + ".E");
            ps.x = detail::number_text(detail::required(pj, "x", path), path + ".x");
            if (auto f = pj.find("P"); f != pj.end()) ps.P = detail::number_text(*f, path + ".P");
            if (auto f = pj.find("v"); f != pj.end()) ps.v = detail::number_text(*f, path + ".v");
            if (auto f = pj.find("mu"); f != pj.end()) ps.mu = detail::number_text(*f, path + ".mu");
            if (ps.P.has_value() == ps.v.has_value()) throw detail::config_error(path, "give exactly one of P and v");
            cfg.particles.push_back(std::move(ps));
        }
    }
    if (auto it = root.find("mirror"); it != root.end()) {
        if (!it->is_object()) throw detail::config_error("mirror", "expected an object");
        detail::reject_unknown(*it, {"mu", "E_total", "sigma1", "x1"}, "mirror");
        MirrorSpec ms;
        ms.mu = detail::number_text(detail::required(*it, "mu", "mirror"), "mirror.mu");
        ms.E_total = detail::number_text(detail::required(*it, "E_total", "mirror"), "mirror.E_total");
        ms.sigma1 = detail::number_text(detail::required(*it, "sigma1", "mirror"), "mirror.sigma1");
        ms.x1 = detail::number_text(detail::required(*it, "x1", "mirror"), "mirror.x1");
        cfg.mirror = std::move(ms);
    }
    if (auto it = root.find("scan"); it != root.end()) {
        if (!it->is_object()) throw detail::config_error("scan", "expected an object");
        detail::reject_unknown(*it, {"mu", "E_total", "sigma1", "steps"}, "scan");
        ScanSpec sc;
        sc.mu = detail::number_list(detail::required(*it, "mu", "scan"), "scan.mu");
        sc.E_total = detail::number_list(detail::required(*it, "E_total", "scan"), "scan.E_total");
        sc.sigma1 = detail::number_list(detail::required(*it, "sigma1", "scan"), "scan.sigma1");
        if (auto f = it->find("steps"); f != it->end()) sc.steps = detail::count_value(*f, "scan.steps");
        cfg.scan = std::move(sc);
    }
    if (auto it = root.find("stop"); it != root.end()) {
        if (!it->is_object()) throw detail::config_error("stop", "expected an object");
        detail::reject_unknown(*it, {"max_events", "t_limit"}, "stop");
        if (auto f = it->find("max_events"); f != it->end()) {
            cfg.stop.max_events = detail::count_value(*f, "stop.max_events");
        }
        if (auto f = it->find("t_limit"); f != it->end()) cfg.stop.t_limit = detail::number_text(*f, "stop.t_limit");
    }
    if (auto it = root.find("outputs"); it != root.end()) {
        if (!it->is_array()) throw detail::config_error("outputs", "expected a list");
        for (std::size_t i = 0; i < it->size(); ++i) {
            const auto name = detail::string_value((*it)[i], "outputs[" + std::to_string(i) + "]");
            if (!known_outputs().contains(name)) {
                throw detail::config_error("outputs[" + std::to_string(i) + "]", "unknown artifact '" + name + "'");
            }
            cfg.outputs.insert(name);
        }
    }
    return cfg;
}

inline ScenarioConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::Validation, "cannot read config '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

template <Scalar Real>
Real config_number(const std::string& text, const std::string& path) {
    try {
        return parse_scalar<Real>(text);
    } catch (const Error& e) {
        throw detail::config_error(path, e.what());
    }
}

/// Initial state of a general-mode scenario.
template <Scalar Real>
BilliardState<Real> build_general_state(const ScenarioConfig& cfg) {
    if (cfg.particles.empty()) throw detail::config_error("particles", "empty particle list");
    BilliardState<Real> s;
    for (std::size_t i = 0; i < cfg.particles.size(); ++i) {
        const auto& ps = cfg.particles[i];
        const std::string path = "particles[" + std::to_string(i) + "]";
        const Real E = config_number<Real>(ps.E, path + ".E");
        if (E == 0) throw detail::config_error(path + ".E", "energy must be nonzero");
        const Real P = ps.P ? config_number<Real>(*ps.P, path + ".P") : Real(config_number<Real>(*ps.v, path + ".v") * E);
        const Real x = config_number<Real>(ps.x, path + ".x");
        if (ps.mu) {
            auto p = make_particle(E, P, config_number<Real>(*ps.mu, path + ".mu"), x, i + 1);
            if (auto msg = validate_particle(p); !msg.empty()) throw detail::config_error(path + ".mu", msg);
            s.particles.push_back(p);
        } else {
            s.particles.push_back(make_particle(E, P, x, i + 1));
        }
    }
    if (auto msg = validate_state(s); !msg.empty()) throw Error(ErrorKind::Validation, msg);
    return s;
}

template <Scalar Real>
struct MirrorSetup {
    MirrorParams<Real> params;
    MirrorState<Real> initial;
};

template <Scalar Real>
MirrorSetup<Real> build_mirror_setup(const ScenarioConfig& cfg) {
    if (!cfg.mirror) throw detail::config_error("mirror", "missing");
    const auto& m = *cfg.mirror;
    const Real mu = config_number<Real>(m.mu, "mirror.mu");
    const Real energy = config_number<Real>(m.E_total, "mirror.E_total");
    const Real sigma1 = config_number<Real>(m.sigma1, "mirror.sigma1");
    const Real x1 = config_number<Real>(m.x1, "mirror.x1");
    if (!(mu > 0)) throw detail::config_error("mirror.mu", "must be positive");
    if (energy == 0) throw detail::config_error("mirror.E_total", "must be nonzero");
    if (sigma1 == 0) throw detail::config_error("mirror.sigma1", "must be nonzero");
    if (!(x1 < 0)) throw detail::config_error("mirror.x1", "must be negative");
    const auto p = MirrorParams<Real>::make(mu, energy);
    return {p, initial_mirror_state(p, sigma1, x1)};
}

/// Event cap for scenarios without a "stop" section; runs that run out of
/// collisions end sooner.
inline constexpr std::size_t kDefaultMaxEvents = 10000;

template <Scalar Real>
StopCondition<Real> build_stop(const ScenarioConfig& cfg) {
    StopCondition<Real> stop;
    stop.max_events = cfg.stop.max_events;
    if (cfg.stop.t_limit) stop.t_limit = config_number<Real>(*cfg.stop.t_limit, "stop.t_limit");
    if (!stop.max_events && !stop.t_limit) stop.max_events = kDefaultMaxEvents;
    return stop;
}

}  // namespace relbill
