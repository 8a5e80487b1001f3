#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "keplerlab/errors.hpp"
#include "keplerlab/kepler.hpp"

using namespace keplerlab;
using doctest::Approx;

namespace {

const State kReferenceState{{-3.0, 0.0}, {0.0, 0.45}, 0.0};

// 40-digit reference values for the orbit through kReferenceState.
constexpr double kA = 2.154398563734290843806;
constexpr double kB = 1.981512397742124918759;
constexpr double kE = 0.3925;
constexpr double kT = 19.86867677396770332336;

double rel(double got, double want) { return std::abs(got - want) / std::abs(want); }

}  // namespace

TEST_SUITE("kepler") {

TEST_CASE("force and potential") {
    CHECK(force({1, 0}) == PlanarVector{-1, 0});
    const PlanarVector f = force({-3, 0});
    CHECK(f.x1 == Approx(1.0 / 9.0).epsilon(1e-15));
    CHECK(f.x2 == 0.0);
    CHECK(force({0, 2}) == PlanarVector{0, -0.25});
    CHECK(potential({0, 2}) == -0.5);
    CHECK(potential_gradient({0, 2}) == PlanarVector{0, 0.25});
}

TEST_CASE("singularity floor") {
    CHECK_THROWS_AS(force({1e-13, 0}), DomainError);
    CHECK_THROWS_AS(potential({0, 0}), DomainError);
    CHECK_NOTHROW(force({1e-6, 0}, 1e-7));
    CHECK_THROWS_AS(force({1e-6, 0}, 1e-5), DomainError);
    try {
        force({0, 5e-13});
    } catch (const DomainError& e) {
        CHECK(e.radius() == Approx(5e-13));
    }
}

TEST_CASE("hessian matches finite differences of the gradient") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-3, 3);
    for (int i = 0; i < 50; ++i) {
        const PlanarVector x{u(rng), u(rng)};
        if (norm(x) < 0.3) continue;
        const Matrix2 H = potential_hessian(x);
        const double d = 1e-6;
        const PlanarVector c1 = (potential_gradient(x + PlanarVector{d, 0}) - potential_gradient(x - PlanarVector{d, 0})) / (2 * d);
        const PlanarVector c2 = (potential_gradient(x + PlanarVector{0, d}) - potential_gradient(x - PlanarVector{0, d})) / (2 * d);
        const double scale = 1.0 / std::pow(norm(x), 3);
        CHECK(std::abs(H.a11 - c1.x1) < 1e-7 * scale);
        CHECK(std::abs(H.a21 - c1.x2) < 1e-7 * scale);
        CHECK(std::abs(H.a12 - c2.x1) < 1e-7 * scale);
        CHECK(std::abs(H.a22 - c2.x2) < 1e-7 * scale);
    }
}

TEST_CASE("energy and angular momentum") {
    CHECK(energy({{1, 0}, {0, 1}}) == -0.5);
    CHECK(energy(kReferenceState) == Approx(0.10125 - 1.0 / 3.0).epsilon(1e-15));
    CHECK(energy({{2, 0}, {0, 1 / std::sqrt(2.0)}}) == Approx(-0.25).epsilon(1e-15));
    CHECK(angular_momentum({{1, 0}, {0, 1}}) == 1.0);
    CHECK(angular_momentum(kReferenceState) == -1.35);
    CHECK(angular_momentum({{1, 2}, {2, 4}}) == 0.0);
}

TEST_CASE("Laplace-Runge-Lenz vector") {
    const LrlVector circ = lrl({{1, 0}, {0, 1}});
    CHECK(circ.A == 0.0);
    CHECK(circ.B == 0.0);

    // Aphelion at (-3, 0): the vector points to +x1 with length e = 0.3925.
    const LrlVector p = lrl(kReferenceState);
    CHECK(p.A == Approx(kE).epsilon(1e-14));
    CHECK(std::abs(p.B) < 1e-15);
    CHECK(p.magnitude() == Approx(elements_from_state(kReferenceState).eccentricity).epsilon(1e-12));
    CHECK(p.angle() == Approx(0.0));
}

TEST_CASE("elements from state") {
    const OrbitElements c = elements_from_state({{1, 0}, {0, 1}});
    CHECK(c.semimajor == Approx(1.0).epsilon(1e-15));
    CHECK(c.semiminor == Approx(1.0).epsilon(1e-15));
    CHECK(c.eccentricity < 1e-15);
    CHECK(c.period == Approx(2 * std::numbers::pi).epsilon(1e-15));
    CHECK(c.energy == -0.5);
    CHECK(c.angular_momentum == 1.0);

    const OrbitElements el = elements_from_state(kReferenceState);
    CHECK(rel(el.semimajor, kA) < 1e-14);
    CHECK(rel(el.semiminor, kB) < 1e-14);
    CHECK(rel(el.eccentricity, kE) < 1e-14);
    CHECK(rel(el.period, kT) < 1e-14);
    CHECK(el.energy == Approx(-0.2320833333333333).epsilon(1e-15));
    CHECK(el.angular_momentum == -1.35);

    // Defining relations of the elements.
    CHECK(rel(el.energy, -1 / (2 * el.semimajor)) < 1e-12);
    CHECK(rel(el.period, 2 * std::numbers::pi * std::pow(el.semimajor, 1.5)) < 1e-12);
    CHECK(rel(el.angular_momentum * el.angular_momentum, el.semiminor * el.semiminor / el.semimajor) < 1e-12);
    CHECK(rel(el.eccentricity, std::sqrt(1 - el.semiminor * el.semiminor / (el.semimajor * el.semimajor))) < 1e-12);
    CHECK(el.semiminor <= el.semimajor);

    CHECK_THROWS_AS(elements_from_state({{-3, 0}, {0, 1}}), UnboundOrbit);
    CHECK_THROWS_AS(elements_from_state({{-3, 0}, {0.1, 0}}), DegenerateOrbit);
}

TEST_CASE("Lagrange identity uses |x|^2") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-2, 2);
    for (int i = 0; i < 200; ++i) {
        const State s{{u(rng), u(rng)}, {u(rng), u(rng)}};
        const double L = angular_momentum(s);
        const double rhs = norm_squared(s.position) * norm_squared(s.velocity) - std::pow(dot(s.position, s.velocity), 2);
        CHECK(std::abs(L * L - rhs) <= 1e-12 * norm_squared(s.position) * norm_squared(s.velocity));
    }
}

TEST_CASE("elements from shape round-trip") {
    for (double e : {0.0, 0.2, 0.6, 0.9}) {
        for (double sign : {-1.0, 1.0}) {
            const OrbitElements el = elements_from_shape(1.7, e, sign, 0.4);
            const State p = perihelion_state(el);
            const OrbitElements back = elements_from_state(p);
            CHECK(rel(back.semimajor, 1.7) < 1e-13);
            CHECK(std::abs(back.eccentricity - e) < 1e-13);
            CHECK(back.angular_momentum * sign > 0);
            CHECK(norm(p.position) == Approx(1.7 * (1 - e)).epsilon(1e-13));
            if (e > 0) CHECK(back.apsis_angle == Approx(0.4).epsilon(1e-12));
        }
    }
    CHECK_THROWS_AS(elements_from_shape(-1, 0.1), std::invalid_argument);
    CHECK_THROWS_AS(elements_from_shape(1, 1.0), std::invalid_argument);
}

TEST_CASE("Kepler equation") {
    CHECK(solve_kepler_equation(1.0, 0.5) == Approx(1.498701133517848314).epsilon(1e-15));
    for (double e : {0.0, 0.3, 0.7, 0.95, 0.999}) {
        for (int i = -20; i <= 40; ++i) {
            const double M = 0.37 * i;
            const double E = solve_kepler_equation(M, e);
            CHECK(std::abs(E - e * std::sin(E) - M) < 1e-12);
        }
    }
}

TEST_CASE("exact propagation") {
    const ExactOrbit orbit(kReferenceState);
    const State s0 = orbit.state_at(0);
    CHECK(norm(s0.position - kReferenceState.position) < 1e-12);
    CHECK(norm(s0.velocity - kReferenceState.velocity) < 1e-12);

    const State sT = orbit.state_at(kT);
    CHECK(norm(sT.position - kReferenceState.position) < 1e-8);
    CHECK(norm(sT.velocity - kReferenceState.velocity) < 1e-8);

    // Perihelion half a period after the aphelion start.
    const State half = orbit.state_at(kT / 2);
    CHECK(half.position.x1 == Approx(kA * (1 - kE)).epsilon(1e-12));
    CHECK(std::abs(half.position.x2) < 1e-10);
    CHECK(std::abs(half.velocity.x1) < 1e-10);
    CHECK(half.velocity.x2 == Approx(-1.35 / (kA * (1 - kE))).epsilon(1e-12));

    const State s5 = orbit.state_at(5.0);
    CHECK(s5.position.x1 == Approx(-1.599145626669583745).epsilon(1e-12));
    CHECK(s5.position.x2 == Approx(1.856351291730159637).epsilon(1e-12));
    CHECK(s5.velocity.x1 == Approx(0.5612173966182012168).epsilon(1e-12));
    CHECK(s5.velocity.x2 == Approx(0.1927175084661891422).epsilon(1e-12));

    const State back = exact_state_at(orbit.elements(), kReferenceState, -5.0);
    CHECK(back.position.x2 == Approx(-1.856351291730159637).epsilon(1e-12));
}

TEST_CASE("invariants along the exact orbit") {
    const ExactOrbit orbit(kReferenceState);
    const OrbitElements el0 = orbit.elements();
    const LrlVector a0 = lrl(kReferenceState);
    for (int i = 0; i < 1000; ++i) {
        const State s = orbit.state_at(kT * i / 1000.0);
        CHECK(rel(energy(s), el0.energy) < 1e-9);
        CHECK(rel(angular_momentum(s), el0.angular_momentum) < 1e-9);
        const LrlVector a = lrl(s);
        CHECK(std::abs(a.A - a0.A) < 1e-10);
        CHECK(std::abs(a.B - a0.B) < 1e-10);
        CHECK(rel(a.magnitude(), el0.eccentricity) < 1e-10);
        const OrbitElements el = elements_from_state(s);
        CHECK(rel(el.semimajor, el0.semimajor) < 1e-9);
        CHECK(rel(el.eccentricity, el0.eccentricity) < 1e-9);
    }
}

TEST_CASE("exact_state_at rejects inconsistent elements") {
    OrbitElements el = elements_from_state(kReferenceState);
    el.energy *= 1.01;
    CHECK_THROWS_AS(exact_state_at(el, kReferenceState, 1.0), std::invalid_argument);
}

TEST_CASE("propagation for other eccentricities and orientations") {
    for (double e : {0.0, 0.5, 0.9}) {
        const OrbitElements el = elements_from_shape(1.3, e, 1.0, 2.0);
        const State p = perihelion_state(el);
        const ExactOrbit orbit(p);
        for (double frac : {0.1, 0.37, 0.5, 0.81, 1.0}) {
            const State s = orbit.state_at(frac * el.period);
            CHECK(rel(energy(s), el.energy) < 1e-11);
            CHECK(rel(angular_momentum(s), el.angular_momentum) < 1e-11);
        }
        const State full = orbit.state_at(el.period);
        CHECK(norm(full.position - p.position) < 1e-9);
    }
}

}  // TEST_SUITE
