#pragma once

// Free relativistic particles in one dimension, c = 1. Energy and squared
// mass may have either sign; only E != 0 is required.

#include "relbill/scalar.hpp"

#include <cstddef>
#include <string>

namespace relbill {

/// One free particle. Energy-momentum is held in light-cone form: a
/// near-luminal particle has one tiny and one huge coordinate, and the tiny
/// one cannot be recovered from E + P after rounding.
template <Scalar Real>
struct ParticleState {
    Real sigma;  // E + P
    Real rho;    // E - P
    Real mu;     // squared mass; stored so that drift of sigma rho - mu stays observable
    Real x;      // position
    std::size_t label = 0;

    Real E() const { return (sigma + rho) / 2; }
    Real P() const { return (sigma - rho) / 2; }
};

/// Light-cone coordinates of an energy-momentum pair.
template <Scalar Real>
struct SigmaRho {
    Real sigma;  // E + P
    Real rho;    // E - P
};

template <Scalar Real>
Real velocity(const Real& E, const Real& P) {
    if (E == 0) throw Error(ErrorKind::Degenerate, "undefined velocity: zero energy");
    return P / E;
}

template <Scalar Real>
Real velocity(const ParticleState<Real>& p) {
    const Real sum = p.sigma + p.rho;
    if (sum == 0) throw Error(ErrorKind::Degenerate, "undefined velocity: zero energy");
    return (p.sigma - p.rho) / sum;
}

/// v = (sigma^2 - mu) / (sigma^2 + mu)
template <Scalar Real>
Real velocity_from_sigma(const Real& sigma, const Real& mu) {
    const Real sq = sigma * sigma;
    const Real den = sq + mu;
    if (is_zero(den, Real(abs_value(sq) + abs_value(mu)))) {
        throw Error(ErrorKind::Degenerate, "degenerate kinematics: sigma^2 + mu = 0");
    }
    return (sq - mu) / den;
}

template <Scalar Real>
SigmaRho<Real> to_sigma_rho(const Real& E, const Real& P) {
    return {E + P, E - P};
}

template <Scalar Real>
SigmaRho<Real> to_sigma_rho(const ParticleState<Real>& p) {
    return {p.sigma, p.rho};
}

template <Scalar Real>
struct EnergyMomentum {
    Real E;
    Real P;
};

template <Scalar Real>
EnergyMomentum<Real> from_sigma_rho(const SigmaRho<Real>& sr) {
    return {(sr.sigma + sr.rho) / 2, (sr.sigma - sr.rho) / 2};
}

/// S = m / E for a chosen signed root m of mu.
template <Scalar Real>
Real spin_velocity(const Real& m, const Real& E) {
    if (E == 0) throw Error(ErrorKind::Degenerate, "undefined spin velocity: zero energy");
    return m / E;
}

/// sigma rho - mu = E^2 - P^2 - mu, the drift of the stored squared mass.
template <Scalar Real>
Real mass_shell_residual(const ParticleState<Real>& p) {
    return p.sigma * p.rho - p.mu;
}

/// Checks E != 0 and the mass-shell relation (relative 1e-12 in float mode,
/// exact otherwise). Returns an empty string when valid.
template <Scalar Real>
std::string validate_particle(const ParticleState<Real>& p) {
    if (p.sigma + p.rho == 0) return "energy must be nonzero";
    const Real scale = (p.sigma * p.sigma + p.rho * p.rho) / 2 + abs_value(p.mu);
    if (!is_zero(mass_shell_residual(p), scale)) return "mu does not match E^2 - P^2";
    return {};
}

template <Scalar Real>
ParticleState<Real> make_particle(const Real& E, const Real& P, const Real& x, std::size_t label = 0) {
    const Real sigma = E + P;
    const Real rho = E - P;
    return {sigma, rho, Real(sigma * rho), x, label};
}

/// Particle with an explicitly given squared mass (validated separately).
template <Scalar Real>
ParticleState<Real> make_particle(const Real& E, const Real& P, const Real& mu, const Real& x, std::size_t label) {
    return {Real(E + P), Real(E - P), mu, x, label};
}

}  // namespace relbill
