#pragma once

// Symmetric four-particle systems: outer particles of equal squared mass
// mu > 0 at x1 = -x4, massless inner particles at x2 = -x3. The inner
// particles bounce between the outer ones and each other, and the whole
// motion is generated by the Moebius map
//
//     f(sigma) = mu / (2 E - sigma),      E = E1 + E2 (conserved),
//
// acting on sigma1 = E1 + P1 after each 1-2 collision. Delta = E^2 - mu
// decides the regime: Delta >= 0 escapes to infinity, Delta < 0 is a
// rotation on the circle and may be periodic.

#include "relbill/simulator.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

namespace relbill {

template <Scalar Real>
struct MirrorParams {
    Real mu;      // squared mass of particles 1 and 4
    Real energy;  // E1 + E2
    Real delta;   // energy^2 - mu

    static MirrorParams make(const Real& mu, const Real& energy) {
        if (!(mu > 0)) throw Error(ErrorKind::Validation, "mirror: mu must be positive");
        if (energy == 0) throw Error(ErrorKind::Validation, "mirror: total energy must be nonzero");
        return {mu, energy, Real(energy * energy - mu)};
    }
};

/// State between the n-th and (n+1)-th collision of particles 1 and 2.
template <Scalar Real>
struct MirrorState {
    long n = 0;
    Real sigma1;  // E1 + P1 after collision n
    Real E2;      // energy of particle 2 after collision n
    Real x1;      // position of collision n, always negative
    Real t;       // time of collision n
};

/// Sign of Delta, with |Delta| <= 1e-12 max(E^2, mu) counted as zero in
/// float mode.
template <Scalar Real>
int delta_sign(const MirrorParams<Real>& p) {
    if (is_zero(p.delta, Real(p.energy * p.energy + p.mu))) return 0;
    return sign(p.delta);
}

namespace detail {

template <Scalar Real>
void check_pole(const Real& denominator, const Real& scale, const char* what) {
    if (is_zero(denominator, scale)) throw Error(ErrorKind::Degenerate, what);
}

}  // namespace detail

template <Scalar Real>
Real reduced_map(const Real& sigma, const MirrorParams<Real>& p) {
    const Real den = 2 * p.energy - sigma;
    detail::check_pole(den, Real(abs_value(p.energy) + abs_value(sigma)), "pole of reduced map (sigma = 2E)");
    return p.mu / den;
}

/// f^{-1}(sigma) = 2E - mu / sigma
template <Scalar Real>
Real inverse_map(const Real& sigma, const MirrorParams<Real>& p) {
    if (sigma == 0) throw Error(ErrorKind::Degenerate, "pole of inverse map (sigma = 0)");
    return 2 * p.energy - p.mu / sigma;
}

template <Scalar Real>
Real map_derivative(const Real& sigma, const MirrorParams<Real>& p) {
    const Real den = 2 * p.energy - sigma;
    return p.mu / (den * den);
}

/// E2 after the next collision: E2 sigma1 / (2E - sigma1).
template <Scalar Real>
Real e2_update(const Real& E2, const Real& sigma1, const MirrorParams<Real>& p) {
    const Real den = 2 * p.energy - sigma1;
    detail::check_pole(den, Real(abs_value(p.energy) + abs_value(sigma1)), "pole of reduced map (sigma = 2E)");
    return E2 * sigma1 / den;
}

/// Position of the next collision: x1 mu / sigma1^2.
template <Scalar Real>
Real x1_update(const Real& x1, const Real& sigma1, const MirrorParams<Real>& p) {
    if (sigma1 == 0) throw Error(ErrorKind::Degenerate, "x1 update undefined at sigma = 0");
    return x1 * p.mu / (sigma1 * sigma1);
}

/// x1 E2 / sigma1, constant along every orbit.
template <Scalar Real>
Real motion_constant(const Real& x1, const Real& E2, const Real& sigma1) {
    if (sigma1 == 0) throw Error(ErrorKind::Degenerate, "motion constant undefined at sigma = 0");
    return x1 * E2 / sigma1;
}

template <Scalar Real>
Real motion_constant(const MirrorState<Real>& s) {
    return motion_constant(s.x1, s.E2, s.sigma1);
}

/// E2 = (2E - sigma1 - mu / sigma1) / 2
template <Scalar Real>
Real inner_energy(const Real& sigma1, const MirrorParams<Real>& p) {
    if (sigma1 == 0) throw Error(ErrorKind::Degenerate, "sigma1 must be nonzero");
    return (2 * p.energy - sigma1 - p.mu / sigma1) / 2;
}

template <Scalar Real>
MirrorState<Real> initial_mirror_state(const MirrorParams<Real>& p, const Real& sigma1, const Real& x1) {
    if (!(x1 < 0)) throw Error(ErrorKind::Validation, "mirror: x1 must be negative");
    return {0, sigma1, inner_energy(sigma1, p), x1, Real(0)};
}

/// Iterates the reduced dynamics n_forward steps into the future and
/// n_backward steps into the past. The result is ordered by n.
template <Scalar Real>
std::vector<MirrorState<Real>> reduced_trajectory(const MirrorParams<Real>& p, const MirrorState<Real>& initial,
                                                  std::size_t n_forward, std::size_t n_backward) {
    std::vector<MirrorState<Real>> past;
    past.reserve(n_backward);
    MirrorState<Real> s = initial;
    for (std::size_t k = 0; k < n_backward; ++k) {
        try {
            MirrorState<Real> prev;
            prev.n = s.n - 1;
            prev.sigma1 = inverse_map(s.sigma1, p);
            if (prev.sigma1 == 0) throw Error(ErrorKind::Degenerate, "orbit reaches sigma = 0");
            prev.E2 = s.E2 * (2 * p.energy - prev.sigma1) / prev.sigma1;
            prev.x1 = s.x1 * prev.sigma1 * prev.sigma1 / p.mu;
            prev.t = s.t + s.x1 + prev.x1;
            s = std::move(prev);
        } catch (const Error& e) {
            throw Error(e.kind(), "step " + std::to_string(s.n - 1) + ": " + e.what());
        }
        past.push_back(s);
    }

    std::vector<MirrorState<Real>> out(past.rbegin(), past.rend());
    out.reserve(n_backward + n_forward + 1);
    out.push_back(initial);
    s = initial;
    for (std::size_t k = 0; k < n_forward; ++k) {
        try {
            MirrorState<Real> next;
            next.n = s.n + 1;
            next.sigma1 = reduced_map(s.sigma1, p);
            next.E2 = e2_update(s.E2, s.sigma1, p);
            next.x1 = x1_update(s.x1, s.sigma1, p);
            next.t = s.t - s.x1 - next.x1;
            s = std::move(next);
        } catch (const Error& e) {
            throw Error(e.kind(), "step " + std::to_string(s.n + 1) + ": " + e.what());
        }
        out.push_back(s);
    }
    return out;
}

/// Full four-particle state matching a reduced state: particles 1 and 2 have
/// just collided at x1, particles 3 and 4 mirror them.
template <Scalar Real>
BilliardState<Real> to_billiard_state(const MirrorParams<Real>& p, const MirrorState<Real>& s) {
    if (s.E2 == 0) throw Error(ErrorKind::Validation, "mirror: inner particle energy is zero (fixed point)");
    if (!(s.x1 < 0)) throw Error(ErrorKind::Validation, "mirror: x1 must be negative");
    const Real rho1 = p.mu / s.sigma1;
    const Real twice_e2 = 2 * s.E2;
    BilliardState<Real> b;
    b.t = s.t;
    b.particles = {
        {s.sigma1, rho1, p.mu, s.x1, 1},
        {twice_e2, Real(0), Real(0), s.x1, 2},
        {Real(0), twice_e2, Real(0), Real(-s.x1), 3},
        {rho1, s.sigma1, p.mu, Real(-s.x1), 4},
    };
    return b;
}

template <Scalar Real>
bool tachyonic_predicate(const Real& sigma1, const MirrorParams<Real>& p) {
    return sigma1 * (sigma1 - 2 * p.energy) > 0;
}

enum class TachyonClass { None, ExactlyTwoConsecutive, InfinitelyMany };

inline const char* to_string(TachyonClass c) {
    switch (c) {
        case TachyonClass::None: return "None";
        case TachyonClass::ExactlyTwoConsecutive: return "ExactlyTwoConsecutive";
        case TachyonClass::InfinitelyMany: return "InfinitelyMany";
    }
    return "?";
}

/// Number of tachyonic collisions over the whole (two-sided) orbit of
/// sigma1_0. A stationary orbit at a fixed point is classified by its
/// predicate value, i.e. None.
template <Scalar Real>
TachyonClass classify_tachyonic(const MirrorParams<Real>& p, const Real& sigma1_0) {
    const int ds = delta_sign(p);
    if (ds < 0) return TachyonClass::InfinitelyMany;
    const Real offset = sigma1_0 - p.energy;
    if (ds == 0) {
        return is_zero(offset, abs_value(p.energy)) ? TachyonClass::None : TachyonClass::ExactlyTwoConsecutive;
    }
    return offset * offset > p.delta ? TachyonClass::ExactlyTwoConsecutive : TachyonClass::None;
}

/// kappa = -2 E2 / sigma1 of the initial state.
template <Scalar Real>
Real kappa(const MirrorState<Real>& initial) {
    if (initial.sigma1 == 0) throw Error(ErrorKind::Degenerate, "kappa undefined at sigma = 0");
    return -2 * initial.E2 / initial.sigma1;
}

/// Upper bound 4 kappa E^2 / mu for x1^n / x1^0 at tachyonic collisions.
/// Requires Delta >= -E^2 and kappa >= 0.
template <Scalar Real>
Real tachyon_scale_bound(const MirrorParams<Real>& p, const Real& kappa_value) {
    if (p.delta < -(p.energy * p.energy)) {
        throw Error(ErrorKind::Validation, "tachyon scale bound needs Delta >= -E^2 (mu <= 2 E^2)");
    }
    if (kappa_value < 0) throw Error(ErrorKind::Validation, "tachyon scale bound needs kappa >= 0");
    return 4 * kappa_value * p.energy * p.energy / p.mu;
}

// ---------------------------------------------------------------------------
// Analysis in double precision: fixed points, conjugacy to a rotation,
// periods, limits.

using Complex = std::complex<double>;

enum class FixedPointKind { Hyperbolic, Parabolic, Elliptic };

struct FixedPoints {
    FixedPointKind kind;
    Complex attractor;  // for Elliptic: E + i sqrt(-Delta)
    Complex repeller;   // for Elliptic: E - i sqrt(-Delta)
    double derivative_at = 1.0;  // |f'| at each fixed point
    double derivative_re = 1.0;
};

template <Scalar Real>
MirrorParams<double> to_double_params(const MirrorParams<Real>& p) {
    return {to_double(p.mu), to_double(p.energy), to_double(p.delta)};
}

inline FixedPoints fixed_points(const MirrorParams<double>& p) {
    const int ds = delta_sign(p);
    const double e = p.energy;
    if (ds < 0) {
        const double w = std::sqrt(-p.delta);
        const Complex at{e, w}, re{e, -w};
        const double d = p.mu / std::norm(Complex(2 * e) - at);
        return {FixedPointKind::Elliptic, at, re, d, d};
    }
    if (ds == 0) return {FixedPointKind::Parabolic, e, e, 1.0, 1.0};
    const double w = std::sqrt(p.delta);
    const double at = e > 0 ? e - w : e + w;
    const double re = e > 0 ? e + w : e - w;
    return {FixedPointKind::Hyperbolic, at, re, map_derivative(at, p), map_derivative(re, p)};
}

/// h(sigma) = (sigma - sigma_at) / (sigma_re - sigma); conjugates f to the
/// rotation z -> lambda z with lambda = sigma_at / sigma_re.
inline Complex conjugacy_h(Complex sigma, const MirrorParams<double>& p) {
    const auto fp = fixed_points(p);
    const Complex den = fp.repeller - sigma;
    if (std::abs(den) <= kFloatTolerance * (std::abs(fp.repeller) + std::abs(sigma))) {
        throw Error(ErrorKind::Degenerate, "conjugacy h: pole at the repeller");
    }
    return (sigma - fp.attractor) / den;
}

inline Complex conjugacy_h_inverse(Complex z, const MirrorParams<double>& p) {
    const auto fp = fixed_points(p);
    const Complex den = 1.0 + z;
    if (std::abs(den) <= kFloatTolerance * (1.0 + std::abs(z))) {
        throw Error(ErrorKind::Degenerate, "conjugacy h^-1: pole at z = -1");
    }
    return (fp.attractor + z * fp.repeller) / den;
}

inline Complex rotation_multiplier(const MirrorParams<double>& p) {
    const auto fp = fixed_points(p);
    return fp.attractor / fp.repeller;
}

/// theta in (0, 2 pi) with sigma_at / sigma_re = exp(i theta).
inline double rotation_angle(const MirrorParams<double>& p) {
    if (delta_sign(p) >= 0) throw Error(ErrorKind::Validation, "not elliptic: rotation angle needs Delta < 0");
    double theta = 2.0 * std::atan2(std::sqrt(-p.delta), p.energy);
    if (theta <= 0) theta += 2 * std::numbers::pi;
    return theta;
}

struct Period {
    long a = 0;
    long b = 0;
    double T = 0;        // 2 k b mu / (mu - E^2)
    double theta = 0;
    double closure = 0;  // relative |f^b(s) - s| at the confirmation point
};

/// A real starting point whose orbit stays as far as possible from the poles
/// of f and f^{-1}, for a rotation of period b. h maps the orbit of the poles
/// to -lambda^m, which for theta = 2 pi a / b are the points -exp(2 pi i j / b);
/// this returns the preimage of the midpoint -exp(i pi / b).
inline double generic_orbit_point(const MirrorParams<double>& p, long b) {
    if (b < 1) throw Error(ErrorKind::Validation, "generic orbit point needs b >= 1");
    return conjugacy_h_inverse(-std::polar(1.0, std::numbers::pi / static_cast<double>(b)), p).real();
}

/// Looks for theta / 2pi = a / b with b <= b_max among the continued
/// fraction convergents, within tol, and confirms the candidate by iterating
/// f b times.
inline std::optional<Period> period(const MirrorParams<double>& p, double k, long b_max = 10000, double tol = 1e-9) {
    const double theta = rotation_angle(p);
    const double x = theta / (2 * std::numbers::pi);

    // Convergents h / kk of x, seeded with h_{-1} = 1, h_{-2} = 0, k_{-1} = 0, k_{-2} = 1.
    long h = 1, h_prev = 0;
    long kk = 0, k_prev = 1;
    double rem = x;
    for (int iter = 0; iter < 64; ++iter) {
        const double a_n = std::floor(rem);
        if (a_n > 1e15) break;
        const long a_i = static_cast<long>(a_n);
        const long h_next = a_i * h + h_prev;
        const long k_next = a_i * kk + k_prev;
        h_prev = h;
        h = h_next;
        k_prev = kk;
        kk = k_next;
        if (kk > b_max) break;
        if (h > 0 && h < kk && std::abs(x - static_cast<double>(h) / static_cast<double>(kk)) <= tol) {
            const double s0 = generic_orbit_point(p, kk);
            double s = s0;
            for (long j = 0; j < kk; ++j) s = reduced_map(s, p);
            const double closure = relative_difference(s, s0);
            if (closure <= 1e-9) {
                return Period{h, kk, 2 * k * static_cast<double>(kk) * p.mu / (p.mu - p.energy * p.energy), theta,
                              closure};
            }
        }
        const double frac = rem - a_n;
        if (frac < 1e-300) break;
        rem = 1.0 / frac;
    }
    return std::nullopt;
}

struct LimitVelocities {
    double past = 0;
    double future = 0;
    bool zero_speed_bounce = false;  // Delta = 0: limits are 0+ (past) and 0- (future)
};

/// Asymptotic velocities of particle 1: +sqrt(Delta)/|E| in the past and
/// -sqrt(Delta)/|E| in the future.
inline LimitVelocities limit_velocities(const MirrorParams<double>& p) {
    const int ds = delta_sign(p);
    if (ds < 0) throw Error(ErrorKind::Validation, "limit velocities need Delta >= 0");
    if (ds == 0) return {0.0, 0.0, true};
    const double v = std::sqrt(p.delta) / std::abs(p.energy);
    return {v, -v, false};
}

struct LimitProducts {
    double past = 0;
    double future = 0;
};

/// Limits of x1 E2 as t -> -inf and t -> +inf: k sigma_re and k sigma_at.
template <Scalar Real>
LimitProducts limit_products(const MirrorParams<Real>& p, const MirrorState<Real>& initial) {
    const auto pd = to_double_params(p);
    if (delta_sign(pd) < 0) throw Error(ErrorKind::Validation, "limit products need Delta >= 0");
    const double k = to_double(motion_constant(initial));
    const auto fp = fixed_points(pd);
    return {k * fp.repeller.real(), k * fp.attractor.real()};
}

}  // namespace relbill
