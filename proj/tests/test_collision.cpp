#include <catch_amalgamated.hpp>

#include <relbill/collision.hpp>

#include "test_support.hpp"

using namespace relbill;
using Catch::Approx;

namespace {

// Second algebraic route to the outgoing state, via the collision
// determinant D = sigma_i rho_j - sigma_j rho_i:
//   sigma'_i = sigma_i - D / r,  rho'_i = rho_i + D / s  (and symmetric for j).
struct DeterminantRoute {
    SigmaRho<double> i, j;
};

DeterminantRoute determinant_route(SigmaRho<double> a, SigmaRho<double> b) {
    const double s = a.sigma + b.sigma;
    const double r = a.rho + b.rho;
    const double d = a.sigma * b.rho - b.sigma * a.rho;
    return {{a.sigma - d / r, a.rho + d / s}, {b.sigma + d / r, b.rho - d / s}};
}

ParticleState<double> random_particle() {
    const double E = testing::signed_magnitude(0.05, 5.0);
    const int kind = static_cast<int>(testing::uniform(0, 3));
    double v = 0;
    if (kind == 0) v = testing::uniform(-0.98, 0.98);           // bradyon
    else if (kind == 1) v = testing::uniform(0, 1) < 0.5 ? -1 : 1;  // massless
    else v = testing::signed_magnitude(1.02, 5.0);            // tachyon
    return make_particle(E, E * v, 0.0);
}

}  // namespace

TEST_CASE("collision condition", "[collision]") {
    CHECK_FALSE(collision_condition<double>({1, 1}, {1, 1}));
    CHECK(collision_condition<double>({1, 1}, {0, -2}));
    CHECK(collision_determinant<double>({1, 1}, {0, -2}) == -2);
    CHECK(collision_condition<double>({3, 1}, {1, 2}));
    CHECK(collision_determinant<double>({3, 1}, {1, 2}) == 5);
}

TEST_CASE("rest mass squared of the pair", "[collision]") {
    CHECK(rest_mass_squared<double>({1, 1}, {0, -2}) == -1);
    CHECK(rest_mass_squared<double>({1, 1}, {1, 1}) == 4);
    CHECK(rest_mass_squared<double>({3, 1}, {0, 2}) == 9);
}

TEST_CASE("tachyonic classification", "[collision]") {
    CHECK(is_tachyonic<double>({1, 1}, {0, -2}));
    CHECK_FALSE(is_tachyonic<double>({1, 1}, {1, 1}));
    CHECK(is_tachyonic<double>({4, 0.25}, {0, -2}));
}

TEST_CASE("zero-energy tachyonic collision: particle at rest hit by a negative-energy photon", "[collision]") {
    SECTION("rational, exact") {
        const auto a = make_particle(Rational(1), Rational(0), Rational(0));
        const auto b = make_particle(Rational(-1), Rational(1), Rational(0));
        const auto res = collide(a, b);
        CHECK(res.i.E() == -1);
        CHECK(res.i.P() == 0);
        CHECK(res.j.E() == 1);
        CHECK(res.j.P() == 1);
        CHECK(res.outcome.tachyonic);
        CHECK(res.outcome.sign_flip_i);
        CHECK(res.outcome.sign_flip_j);
    }
    SECTION("float") {
        const auto res = collide(make_particle(1.0, 0.0, 0.0), make_particle(-1.0, 1.0, 0.0));
        CHECK(res.i.E() == Approx(-1).margin(1e-14));
        CHECK(res.i.P() == Approx(0).margin(1e-14));
        CHECK(res.j.E() == Approx(1).margin(1e-14));
        CHECK(res.j.P() == Approx(1).margin(1e-14));
        CHECK(res.outcome.tachyonic);
    }
}

TEST_CASE("hand-evaluated collision conserves totals", "[collision]") {
    const auto res = collide(make_particle(2.0, 1.0, 0.0), make_particle(1.0, -1.0, 0.0));
    CHECK(res.outcome.s == 3);
    CHECK(res.outcome.r == 3);
    CHECK(res.i.E() == 2);
    CHECK(res.i.P() == -1);
    CHECK(res.j.E() == 1);
    CHECK(res.j.P() == 1);
    CHECK_FALSE(res.outcome.tachyonic);
}

TEST_CASE("equal squared masses swap their light-cone coordinates", "[collision]") {
    for (int n = 0; n < 200; ++n) {
        const double mu = testing::uniform(-2, 2);
        const double si = testing::signed_magnitude(0.1, 3), sj = testing::signed_magnitude(0.1, 3);
        const SigmaRho<double> i{si, mu / si}, j{sj, mu / sj};
        if (!collision_condition(i, j) || is_zero(rest_mass_squared(i, j), 1.0)) continue;
        const auto out = resolve_collision(i, mu, j, mu);
        REQUIRE(out.sr_i_after.sigma == j.sigma);
        REQUIRE(out.sr_i_after.rho == j.rho);
        REQUIRE(out.sr_j_after.sigma == i.sigma);
        REQUIRE(out.sr_j_after.rho == i.rho);
        // The general formula reaches the same point.
        const auto general = determinant_route(i, j);
        REQUIRE(general.i.sigma == Approx(j.sigma).margin(1e-9));
        REQUIRE(general.j.rho == Approx(i.rho).margin(1e-9));
    }
}

TEST_CASE("collision errors", "[collision]") {
    CHECK_THROWS_MATCHES(resolve_collision<double>({1, 1}, {1, 1}), Error,
                         Catch::Matchers::Predicate<Error>([](const Error& e) { return e.kind() == ErrorKind::NoCollision; }));
    // s = 0: sigma_i = -sigma_j.
    CHECK_THROWS_WITH(resolve_collision<double>({1, 2}, {-1, 3}), Catch::Matchers::ContainsSubstring("sr = 0"));
    // r within 1e-12 of zero relative to the inputs.
    CHECK_THROWS_WITH(resolve_collision<double>({1, 2}, {3, -2 + 1e-15}), Catch::Matchers::ContainsSubstring("sr = 0"));
    CHECK_THROWS_WITH(resolve_collision<Rational>({1, 2}, {3, -2}), Catch::Matchers::ContainsSubstring("sr = 0"));
}

TEST_CASE("random collisions: conservation, mass shell, second route, closure", "[collision][property]") {
    int resolved = 0;
    for (int n = 0; n < 20000; ++n) {
        const auto a = random_particle();
        const auto b = random_particle();
        const auto si = to_sigma_rho(a), sj = to_sigma_rho(b);
        if (!collision_condition(si, sj)) continue;
        const double scale = (std::abs(si.sigma) + std::abs(sj.sigma)) * (std::abs(si.rho) + std::abs(sj.rho));
        if (std::abs(rest_mass_squared(si, sj)) < 1e-6 * scale) continue;
        ++resolved;

        const auto res = collide(a, b);
        const double escale = std::abs(a.E()) + std::abs(b.E()) + std::abs(a.P()) + std::abs(b.P());
        REQUIRE(std::abs(res.i.E() + res.j.E() - a.E() - b.E()) <= 1e-12 * escale);
        REQUIRE(std::abs(res.i.P() + res.j.P() - a.P() - b.P()) <= 1e-12 * escale);
        const auto oi = res.outcome.sr_i_after, oj = res.outcome.sr_j_after;
        REQUIRE(std::abs(oi.sigma * oi.rho - a.mu) <= 1e-12 * (std::abs(oi.sigma * oi.rho) + std::abs(a.mu) + 1e-300) * 4);
        REQUIRE(std::abs(oj.sigma * oj.rho - b.mu) <= 1e-12 * (std::abs(oj.sigma * oj.rho) + std::abs(b.mu) + 1e-300) * 4);

        const auto route = determinant_route(si, sj);
        const double sscale = std::abs(si.sigma) + std::abs(sj.sigma) + std::abs(si.rho) + std::abs(sj.rho);
        REQUIRE(std::abs(route.i.sigma - oi.sigma) <= 1e-9 * sscale * std::max(1.0, std::abs(res.outcome.s / res.outcome.r)));
        REQUIRE(std::abs(route.j.rho - oj.rho) <= 1e-9 * sscale * std::max(1.0, std::abs(res.outcome.r / res.outcome.s)));

        REQUIRE(res.outcome.tachyonic == (res.outcome.s * res.outcome.r < 0));
        if (a.mu >= 0) REQUIRE(res.outcome.sign_flip_i == res.outcome.tachyonic);
        if (b.mu >= 0) REQUIRE(res.outcome.sign_flip_j == res.outcome.tachyonic);

        // Resolving the outgoing pair again returns the incoming one.
        const auto back = resolve_collision(oi, a.mu, oj, b.mu);
        REQUIRE(back.sr_i_after.sigma == Approx(si.sigma).margin(1e-9 * sscale));
        REQUIRE(back.sr_i_after.rho == Approx(si.rho).margin(1e-9 * sscale));
        REQUIRE(back.sr_j_after.sigma == Approx(sj.sigma).margin(1e-9 * sscale));
    }
    CHECK(resolved > 15000);
}

TEST_CASE("random rational collisions conserve exactly", "[collision][property]") {
    for (int n = 0; n < 300; ++n) {
        auto rnd = [] { return Rational(static_cast<long>(testing::uniform(-50, 50)), static_cast<long>(testing::uniform(1, 20))); };
        Rational Ea = rnd(), Eb = rnd();
        if (Ea == 0 || Eb == 0) continue;
        const auto a = make_particle(Ea, rnd(), Rational(0));
        const auto b = make_particle(Eb, rnd(), Rational(0));
        const auto si = to_sigma_rho(a), sj = to_sigma_rho(b);
        if (!collision_condition(si, sj) || rest_mass_squared(si, sj) == 0) continue;
        const auto res = collide(a, b);
        REQUIRE(res.i.E() + res.j.E() == a.E() + b.E());
        REQUIRE(res.i.P() + res.j.P() == a.P() + b.P());
        REQUIRE(res.i.E() * res.i.E() - res.i.P() * res.i.P() == a.mu);
        REQUIRE(res.j.E() * res.j.E() - res.j.P() * res.j.P() == b.mu);
        const auto back = collide(res.i, res.j);
        REQUIRE(back.i.E() == a.E());
        REQUIRE(back.j.P() == b.P());
    }
}
