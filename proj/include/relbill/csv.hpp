#pragma once

// Versioned CSV artifacts. Floats are written in shortest round-trip
// scientific form and fractions as "a/b", so parsing a file back gives the
// logged values bit for bit. E and P are written for readers; the parser
// rebuilds states from sigma and rho, which is what the engine stores.

#include "relbill/mirror.hpp"

#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace relbill {

inline constexpr std::string_view kEventsMagic = "# relbill-events v1";
inline constexpr std::string_view kMirrorMagic = "# relbill-mirror v1";

namespace detail {

inline const char* const kStateRoles[] = {"i_pre", "j_pre", "i_post", "j_post"};
inline const char* const kStateFields[] = {"E", "P", "mu", "sigma", "rho"};

inline std::string events_header(bool mirror_columns) {
    std::string h = "n,t,left,right,x,tachyonic,sign_flip_i,sign_flip_j,label_i,label_j";
    for (const char* role : kStateRoles) {
        for (const char* f : kStateFields) h += std::string(",") + role + "_" + f;
    }
    if (mirror_columns) h += ",mirror_n,sigma1,E2,x1,k";
    return h;
}

inline std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream ss(line);
    while (std::getline(ss, cell, ',')) out.push_back(cell);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

inline bool parse_flag(const std::string& s, std::size_t line) {
    if (s == "1") return true;
    if (s == "0") return false;
    throw Error(ErrorKind::Validation, "events.csv line " + std::to_string(line) + ": bad flag '" + s + "'");
}

inline std::size_t parse_index(const std::string& s, std::size_t line) {
    std::size_t v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) {
        throw Error(ErrorKind::Validation, "events.csv line " + std::to_string(line) + ": bad index '" + s + "'");
    }
    return v;
}

}  // namespace detail

/// Event log as CSV. With mirror_columns, rows of 1-2 collisions also carry
/// the reduced coordinates sigma1, E2, x1 and the motion constant.
template <Scalar Real>
std::string write_events_csv(const EventLog<Real>& log, bool mirror_columns) {
    std::ostringstream out;
    out << kEventsMagic << "\n# arithmetic: " << ScalarTraits<Real>::name << "\n";
    out << detail::events_header(mirror_columns) << "\n";
    long mirror_n = 0;
    for (std::size_t n = 0; n < log.size(); ++n) {
        const auto& e = log[n];
        out << n << ',' << format_scalar(e.t) << ',' << e.left << ',' << e.left + 1 << ',' << format_scalar(e.x) << ','
            << e.tachyonic << ',' << e.sign_flip_i << ',' << e.sign_flip_j << ',' << e.pre_i.label << ','
            << e.pre_j.label;
        for (const auto* p : {&e.pre_i, &e.pre_j, &e.post_i, &e.post_j}) {
            out << ',' << format_scalar(Real(p->E())) << ',' << format_scalar(Real(p->P())) << ','
                << format_scalar(p->mu) << ',' << format_scalar(p->sigma) << ',' << format_scalar(p->rho);
        }
        if (mirror_columns) {
            if (e.left == 0) {
                ++mirror_n;
                const Real E2 = e.post_j.E();
                out << ',' << mirror_n << ',' << format_scalar(e.post_i.sigma) << ',' << format_scalar(E2) << ','
                    << format_scalar(e.x) << ',';
                if (e.post_i.sigma != 0) out << format_scalar(motion_constant(e.x, E2, e.post_i.sigma));
            } else {
                out << ",,,,,";
            }
        }
        out << '\n';
    }
    return out.str();
}

/// Inverse of write_events_csv for the same arithmetic.
template <Scalar Real>
EventLog<Real> parse_events_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    auto fail = [](std::size_t n, const std::string& msg) {
        return Error(ErrorKind::Validation, "events.csv line " + std::to_string(n) + ": " + msg);
    };
    if (!std::getline(in, line) || line != kEventsMagic) throw fail(1, "missing '" + std::string(kEventsMagic) + "'");
    if (!std::getline(in, line) || line != std::string("# arithmetic: ") + ScalarTraits<Real>::name) {
        throw fail(2, "arithmetic does not match '" + std::string(ScalarTraits<Real>::name) + "'");
    }
    if (!std::getline(in, line)) throw fail(3, "missing column header");
    if (line != detail::events_header(true) && line != detail::events_header(false)) {
        throw fail(3, "unexpected column header");
    }
    const std::size_t width = detail::split_csv(line).size();

    EventLog<Real> log;
    std::size_t lineno = 3;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        const auto cells = detail::split_csv(line);
        if (cells.size() != width) throw fail(lineno, "expected " + std::to_string(width) + " cells");
        auto num = [&](std::size_t c) {
            try {
                return parse_scalar<Real>(cells[c]);
            } catch (const Error& e) {
                throw fail(lineno, e.what());
            }
        };
        CollisionEvent<Real> e;
        e.t = num(1);
        e.left = detail::parse_index(cells[2], lineno);
        e.x = num(4);
        e.tachyonic = detail::parse_flag(cells[5], lineno);
        e.sign_flip_i = detail::parse_flag(cells[6], lineno);
        e.sign_flip_j = detail::parse_flag(cells[7], lineno);
        const std::size_t label_i = detail::parse_index(cells[8], lineno);
        const std::size_t label_j = detail::parse_index(cells[9], lineno);
        ParticleState<Real>* states[] = {&e.pre_i, &e.pre_j, &e.post_i, &e.post_j};
        for (std::size_t r = 0; r < 4; ++r) {
            const std::size_t base = 10 + 5 * r;
            states[r]->mu = num(base + 2);
            states[r]->sigma = num(base + 3);
            states[r]->rho = num(base + 4);
            states[r]->x = e.x;
            states[r]->label = r % 2 == 0 ? label_i : label_j;
        }
        log.push_back(std::move(e));
    }
    return log;
}

/// Reduced trajectory as CSV; tau is t^{n+1} - t^n and is empty on the last
/// row. tachyonic flags the collision that produced row n, so row 0 has none.
template <Scalar Real>
std::string write_mirror_csv(const MirrorParams<Real>& p, const std::vector<MirrorState<Real>>& orbit) {
    std::ostringstream out;
    out << kMirrorMagic << "\n# arithmetic: " << ScalarTraits<Real>::name << "\n";
    out << "# mu: " << format_scalar(p.mu) << ", E_total: " << format_scalar(p.energy)
        << ", Delta: " << format_scalar(p.delta) << "\n";
    out << "n,t,sigma1,E2,x1,k,tau,tachyonic\n";
    for (std::size_t i = 0; i < orbit.size(); ++i) {
        const auto& s = orbit[i];
        out << s.n << ',' << format_scalar(s.t) << ',' << format_scalar(s.sigma1) << ',' << format_scalar(s.E2) << ','
            << format_scalar(s.x1) << ',' << format_scalar(motion_constant(s)) << ',';
        if (i + 1 < orbit.size()) out << format_scalar(Real(orbit[i + 1].t - s.t));
        out << ',';
        if (i > 0) out << tachyonic_predicate(orbit[i - 1].sigma1, p);
        out << '\n';
    }
    return out.str();
}

}  // namespace relbill
