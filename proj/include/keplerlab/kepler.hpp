// The exact Kepler problem with unit gravitational parameter and unit mass:
// potential, conserved quantities, orbital elements, and a closed-form
// propagator used as the reference solution everywhere else.
#pragma once

#include "keplerlab/planar_vector.hpp"

namespace keplerlab {

/// Positions closer to the origin than this are treated as collisions.
inline constexpr double kDefaultSingularityFloor = 1e-12;

/// Phase point of the continuous problem.
struct State {
    PlanarVector position;
    PlanarVector velocity;
    double time = 0.0;
};

/// Shape, size and orientation of a bound orbit.
///
/// energy = -1/(2a), period = 2 pi a^{3/2}, L^2 = b^2/a, e = sqrt(1 - b^2/a^2).
/// apsis_angle is the direction atan2(B, A) of the Laplace-Runge-Lenz vector.
struct OrbitElements {
    double semimajor = 0.0;
    double semiminor = 0.0;
    double eccentricity = 0.0;
    double period = 0.0;
    double energy = 0.0;
    double angular_momentum = 0.0;
    double apsis_angle = 0.0;
};

/// Laplace-Runge-Lenz vector (A, B). Its length is the eccentricity.
struct LrlVector {
    double A = 0.0;
    double B = 0.0;

    double magnitude() const { return std::hypot(A, B); }
    double angle() const { return std::atan2(B, A); }
};

// Throws DomainError when |x| < floor.
double potential(const PlanarVector& x, double floor = kDefaultSingularityFloor);
PlanarVector potential_gradient(const PlanarVector& x, double floor = kDefaultSingularityFloor);
/// Jacobian of potential_gradient: (I |x|^2 - 3 x x^T) / |x|^5.
Matrix2 potential_hessian(const PlanarVector& x, double floor = kDefaultSingularityFloor);
/// -x / |x|^3.
PlanarVector force(const PlanarVector& x, double floor = kDefaultSingularityFloor);

double energy(const State& s);
double angular_momentum(const State& s);
LrlVector lrl(const State& s);

/// Elements of the orbit through `s`.
/// Throws UnboundOrbit if the energy is non-negative, DegenerateOrbit if L = 0.
OrbitElements elements_from_state(const State& s);

/// Elements of a bound orbit with the given semimajor axis and eccentricity.
/// `rotation_sign` is the sign of the angular momentum (+1 counterclockwise).
OrbitElements elements_from_shape(double semimajor, double eccentricity, double rotation_sign = 1.0,
                                  double apsis_angle = 0.0);

/// Perihelion state (at time 0) of the orbit described by `el`.
State perihelion_state(const OrbitElements& el);

/// Eccentric anomaly solving M = E - e sin E, to a residual below 1e-13.
/// Throws SolverFailure if neither Newton nor the bisection fallback converge.
double solve_kepler_equation(double mean_anomaly, double eccentricity);

/// Closed-form propagation of the exact solution through a given initial state.
class ExactOrbit {
public:
    explicit ExactOrbit(const State& initial);

    const OrbitElements& elements() const noexcept { return elements_; }
    const State& initial() const noexcept { return initial_; }

    /// Exact state at absolute time t (the initial state sits at initial().time).
    State state_at(double t) const;

private:
    State initial_;
    OrbitElements elements_;
    PlanarVector perihelion_dir_;
    PlanarVector normal_dir_;
    double mean_motion_ = 0.0;
    double initial_mean_anomaly_ = 0.0;
};

/// State at time t on the orbit through `initial`; `elements` must describe the
/// same orbit (energy and angular momentum agreeing to 1e-10).
State exact_state_at(const OrbitElements& elements, const State& initial, double t);

}  // namespace keplerlab
