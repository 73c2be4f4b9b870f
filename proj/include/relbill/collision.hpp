#pragma once

// Elastic two-particle collisions in light-cone coordinates.
//
// With s = sigma_i + sigma_j and r = rho_i + rho_j fixed by conservation, the
// system sigma_k rho_k = mu_k has exactly one solution besides the incoming
// one:
//     sigma'_k = rho_k s / r,   rho'_k = sigma_k r / s.
// sr = (E_i+E_j)^2 - (P_i+P_j)^2 is the squared rest mass of the pair; a
// collision with sr < 0 is tachyonic.

#include "relbill/kinematics.hpp"

namespace relbill {

template <Scalar Real>
struct CollisionOutcome {
    SigmaRho<Real> sr_i_after;
    SigmaRho<Real> sr_j_after;
    Real s;  // sigma_i + sigma_j
    Real r;  // rho_i + rho_j
    bool tachyonic = false;
    bool sign_flip_i = false;
    bool sign_flip_j = false;
};

/// sigma_i rho_j - sigma_j rho_i; nonzero iff the velocities differ.
template <Scalar Real>
Real collision_determinant(const SigmaRho<Real>& i, const SigmaRho<Real>& j) {
    return i.sigma * j.rho - j.sigma * i.rho;
}

template <Scalar Real>
bool collision_condition(const SigmaRho<Real>& i, const SigmaRho<Real>& j) {
    const Real a = i.sigma * j.rho;
    const Real b = j.sigma * i.rho;
    return !is_zero(Real(a - b), Real(abs_value(a) + abs_value(b)));
}

template <Scalar Real>
Real rest_mass_squared(const SigmaRho<Real>& i, const SigmaRho<Real>& j) {
    return (i.sigma + j.sigma) * (i.rho + j.rho);
}

template <Scalar Real>
bool is_tachyonic(const SigmaRho<Real>& i, const SigmaRho<Real>& j) {
    return rest_mass_squared(i, j) < 0;
}

/// Resolves the collision of i and j with squared masses mu_i and mu_j.
/// Throws NoCollision when the velocities are equal and Degenerate when
/// sr = 0 (within 1e-12 of the input scale in float mode). Equal squared
/// masses exchange their light-cone coordinates exactly.
template <Scalar Real>
CollisionOutcome<Real> resolve_collision(const SigmaRho<Real>& i, const Real& mu_i,
                                         const SigmaRho<Real>& j, const Real& mu_j) {
    if (!collision_condition(i, j)) {
        throw Error(ErrorKind::NoCollision, "no collision: equal velocities");
    }
    CollisionOutcome<Real> out{{}, {}, i.sigma + j.sigma, i.rho + j.rho};
    const Real sr = out.s * out.r;
    const Real scale = (abs_value(i.sigma) + abs_value(j.sigma)) * (abs_value(i.rho) + abs_value(j.rho));
    if (is_zero(sr, scale)) throw Error(ErrorKind::Degenerate, "degenerate collision (sr = 0)");

    if (mu_i == mu_j) {
        out.sr_i_after = j;
        out.sr_j_after = i;
    } else {
        const Real s_over_r = out.s / out.r;
        const Real r_over_s = out.r / out.s;
        out.sr_i_after = {i.rho * s_over_r, i.sigma * r_over_s};
        out.sr_j_after = {j.rho * s_over_r, j.sigma * r_over_s};
        // The larger coordinate of each kind is taken as the remainder of the
        // conserved sum, so s and r survive rounding (exact in rational mode).
        auto balance = [](Real& a, Real& b, const Real& total) {
            if (abs_value(a) >= abs_value(b)) a = total - b;
            else b = total - a;
        };
        balance(out.sr_i_after.sigma, out.sr_j_after.sigma, out.s);
        balance(out.sr_i_after.rho, out.sr_j_after.rho, out.r);
    }
    out.tachyonic = sr < 0;

    // Energy signs are compared directly so that the tachyonic <=> sign flip
    // equivalence for mu >= 0 remains a checkable property.
    auto energy2 = [](const SigmaRho<Real>& v) { return Real(v.sigma + v.rho); };
    out.sign_flip_i = sign(energy2(i)) * sign(energy2(out.sr_i_after)) < 0;
    out.sign_flip_j = sign(energy2(j)) * sign(energy2(out.sr_j_after)) < 0;
    return out;
}

/// Same as above with the squared masses taken as sigma * rho.
template <Scalar Real>
CollisionOutcome<Real> resolve_collision(const SigmaRho<Real>& i, const SigmaRho<Real>& j) {
    return resolve_collision(i, Real(i.sigma * i.rho), j, Real(j.sigma * j.rho));
}

template <Scalar Real>
struct ResolvedPair {
    ParticleState<Real> i;
    ParticleState<Real> j;
    CollisionOutcome<Real> outcome;
};

/// Applies resolve_collision to two particle states. Positions, labels and
/// the stored squared masses are carried over unchanged.
template <Scalar Real>
ResolvedPair<Real> collide(const ParticleState<Real>& a, const ParticleState<Real>& b) {
    auto outcome = resolve_collision(to_sigma_rho(a), a.mu, to_sigma_rho(b), b.mu);
    ParticleState<Real> a2 = a;
    ParticleState<Real> b2 = b;
    a2.sigma = outcome.sr_i_after.sigma;
    a2.rho = outcome.sr_i_after.rho;
    b2.sigma = outcome.sr_j_after.sigma;
    b2.rho = outcome.sr_j_after.rho;
    return {std::move(a2), std::move(b2), std::move(outcome)};
}

}  // namespace relbill
