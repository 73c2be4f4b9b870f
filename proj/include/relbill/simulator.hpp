#pragma once

// Event-driven evolution of N particles on the line. Between collisions the
// particles move freely; adjacent pairs collide elastically. Events are found
// by exact intersection of linear motions, recomputed from the current state
// at every step.

#include "relbill/collision.hpp"

#include <algorithm>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace relbill {

enum class Direction { Forward, Backward };

inline const char* to_string(Direction d) {
    return d == Direction::Forward ? "forward" : "backward";
}

template <Scalar Real>
struct BilliardState {
    std::vector<ParticleState<Real>> particles;  // ordered by position
    Real t{0};
};

template <Scalar Real>
struct CollisionEvent {
    Real t;
    std::size_t left = 0;  // pair is (left, left + 1)
    Real x;
    ParticleState<Real> pre_i, pre_j;
    ParticleState<Real> post_i, post_j;
    bool tachyonic = false;
    bool sign_flip_i = false;
    bool sign_flip_j = false;
};

template <Scalar Real>
struct ScheduledCollision {
    std::size_t left = 0;
    Real t;   // absolute time
    Real x;   // meeting point
    Real dt;  // offset from the state's time; positions advance by this, not by t - s.t
};

template <Scalar Real>
using EventLog = std::vector<CollisionEvent<Real>>;

namespace detail {

template <Scalar Real>
BilliardState<Real> time_reversed(BilliardState<Real> s) {
    for (auto& p : s.particles) std::swap(p.sigma, p.rho);
    s.t = -s.t;
    return s;
}

template <Scalar Real>
EventLog<Real> time_reversed(EventLog<Real> log) {
    for (auto& e : log) {
        e.t = -e.t;
        for (auto* p : {&e.pre_i, &e.pre_j, &e.post_i, &e.post_j}) std::swap(p->sigma, p->rho);
    }
    return log;
}

// Forward-time scheduler; times are offsets from s.t.
template <Scalar Real>
std::vector<ScheduledCollision<Real>> next_collisions_forward(const BilliardState<Real>& s) {
    struct Candidate {
        std::size_t left;
        Real dt;
    };
    std::vector<Candidate> candidates;
    const auto& ps = s.particles;
    for (std::size_t i = 0; i + 1 < ps.size(); ++i) {
        // v_i - v_j = (sigma_i rho_j - sigma_j rho_i) / (2 E_i E_j); the
        // determinant form keeps its precision for near-luminal pairs.
        const auto a = to_sigma_rho(ps[i]);
        const auto b = to_sigma_rho(ps[i + 1]);
        if (!collision_condition(a, b)) continue;
        const Real closing = collision_determinant(a, b) / (Real(a.sigma + a.rho) * Real(b.sigma + b.rho) / 2);
        if (closing <= 0) continue;
        Real gap = ps[i + 1].x - ps[i].x;
        if (gap < 0) gap = 0;
        candidates.push_back({i, Real(gap / closing)});
    }
    if (candidates.empty()) return {};

    Real best = candidates.front().dt;
    for (const auto& c : candidates) best = std::min(best, c.dt);
    const Real t_best = s.t + best;

    std::vector<ScheduledCollision<Real>> out;
    for (const auto& c : candidates) {
        // Offsets carry rounding relative to their own size, so grouping is
        // judged on them rather than on absolute times.
        if (!is_zero(Real(c.dt - best), c.dt)) continue;
        const Real xi = ps[c.left].x + velocity(ps[c.left]) * best;
        const Real xj = ps[c.left + 1].x + velocity(ps[c.left + 1]) * best;
        out.push_back({c.left, t_best, Real((xi + xj) / 2), best});
    }
    return out;
}

template <Scalar Real>
std::vector<CollisionEvent<Real>> step_forward(BilliardState<Real>& s) {
    auto scheduled = next_collisions_forward(s);
    if (scheduled.empty()) throw Error(ErrorKind::NoCollision, "no next event");

    for (std::size_t k = 1; k < scheduled.size(); ++k) {
        const auto& a = scheduled[k - 1];
        const auto& b = scheduled[k];
        if (b.left <= a.left + 1 || is_zero(Real(b.x - a.x), Real(abs_value(a.x) + abs_value(b.x)))) {
            throw Error(ErrorKind::Degenerate, "triple collision: simultaneous events at the same point");
        }
    }

    const Real t_event = scheduled.front().t;
    const Real dt = scheduled.front().dt;
    for (auto& p : s.particles) p.x += velocity(p) * dt;
    s.t = t_event;

    std::vector<CollisionEvent<Real>> events;
    events.reserve(scheduled.size());
    for (const auto& sc : scheduled) {
        auto& a = s.particles[sc.left];
        auto& b = s.particles[sc.left + 1];
        a.x = sc.x;
        b.x = sc.x;
        auto resolved = collide(a, b);
        if (!(velocity(resolved.i) < velocity(resolved.j))) {
            throw Error(ErrorKind::Degenerate, "non-separating collision: pair still approaching afterwards");
        }
        events.push_back({t_event, sc.left, sc.x, a, b, resolved.i, resolved.j, resolved.outcome.tachyonic,
                          resolved.outcome.sign_flip_i, resolved.outcome.sign_flip_j});
        a = std::move(resolved.i);
        b = std::move(resolved.j);
    }
    return events;
}

}  // namespace detail

/// Adjacent pairs that meet first in the given time direction. Approaching
/// pairs that already touch are scheduled at the current time. All events
/// within the simultaneity tolerance of the earliest one are returned, in
/// left-to-right order.
template <Scalar Real>
std::vector<ScheduledCollision<Real>> next_collisions(const BilliardState<Real>& state, Direction dir) {
    if (dir == Direction::Forward) return detail::next_collisions_forward(state);
    auto out = detail::next_collisions_forward(detail::time_reversed(state));
    for (auto& c : out) c.t = -c.t;  // dt stays a nonnegative offset
    return out;
}

/// Advances to the next event time and resolves every collision there.
template <Scalar Real>
std::vector<CollisionEvent<Real>> step(BilliardState<Real>& state, Direction dir) {
    if (dir == Direction::Forward) return detail::step_forward(state);
    auto reversed = detail::time_reversed(state);
    auto events = detail::step_forward(reversed);
    state = detail::time_reversed(std::move(reversed));
    return detail::time_reversed(std::move(events));
}

template <Scalar Real>
struct StopCondition {
    std::optional<std::size_t> max_events;
    std::optional<Real> t_limit;  // absolute time; compared in the run direction
};

template <Scalar Real>
struct SimulationResult {
    BilliardState<Real> final_state;
    EventLog<Real> log;
    bool exhausted = false;  // no further collisions exist
};

/// Runs step() until the stop condition. A simultaneous group is never
/// split, so the log never exceeds max_events. Errors are rethrown with the
/// index of the failing event.
template <Scalar Real>
SimulationResult<Real> simulate(BilliardState<Real> state, Direction dir, const StopCondition<Real>& stop) {
    SimulationResult<Real> result;
    if (!stop.max_events && !stop.t_limit) {
        throw Error(ErrorKind::Validation, "stop condition needs max_events or t_limit");
    }
    auto beyond = [&](const Real& t) {
        if (!stop.t_limit) return false;
        return dir == Direction::Forward ? t > *stop.t_limit : t < *stop.t_limit;
    };
    while (true) {
        if (stop.max_events && result.log.size() >= *stop.max_events) break;
        const auto upcoming = next_collisions(state, dir);
        if (upcoming.empty()) {
            result.exhausted = true;
            break;
        }
        if (beyond(upcoming.front().t)) break;
        if (stop.max_events && result.log.size() + upcoming.size() > *stop.max_events) break;
        try {
            auto events = step(state, dir);
            for (auto& e : events) result.log.push_back(std::move(e));
        } catch (const Error& e) {
            throw Error(e.kind(), "event " + std::to_string(result.log.size()) + ": " + e.what());
        }
    }
    if (stop.t_limit && !beyond(state.t) && state.t != *stop.t_limit) {
        const Real dt = *stop.t_limit - state.t;
        for (auto& p : state.particles) p.x += velocity(p) * dt;
        state.t = *stop.t_limit;
    }
    result.final_state = std::move(state);
    return result;
}

/// Empty string when the state is valid.
template <Scalar Real>
std::string validate_state(const BilliardState<Real>& s) {
    if (s.particles.size() < 2) return "need at least two particles";
    for (std::size_t i = 0; i < s.particles.size(); ++i) {
        if (auto msg = validate_particle(s.particles[i]); !msg.empty()) {
            return "particles[" + std::to_string(i) + "]: " + msg;
        }
        if (i > 0 && s.particles[i].x < s.particles[i - 1].x) {
            return "particles[" + std::to_string(i) + "].x: positions must be nondecreasing";
        }
    }
    return {};
}

template <Scalar Real>
struct Totals {
    Real E{0};
    Real P{0};
};

template <Scalar Real>
Totals<Real> totals(const BilliardState<Real>& s) {
    Totals<Real> t;
    for (const auto& p : s.particles) {
        t.E += p.E();
        t.P += p.P();
    }
    return t;
}

}  // namespace relbill
