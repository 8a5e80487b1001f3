#include "keplerlab/kepler.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "keplerlab/errors.hpp"

namespace keplerlab {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kKeplerTolerance = 1e-13;
constexpr int kKeplerNewtonIterations = 50;
constexpr int kKeplerBisectionIterations = 200;
// Below this eccentricity the apsis direction is numerically meaningless and
// the initial position direction is used as the reference axis instead.
constexpr double kCircularEccentricity = 1e-10;

double checked_radius(const PlanarVector& x, double floor) {
    const double r = std::sqrt(norm_squared(x));
    if (!(r >= floor)) {
        std::ostringstream msg;
        msg << "position (" << x.x1 << ", " << x.x2 << ") is within the singularity floor " << floor;
        throw DomainError(msg.str(), r);
    }
    return r;
}

double sign_of(double v) { return v < 0.0 ? -1.0 : 1.0; }

}  // namespace

double potential(const PlanarVector& x, double floor) { return -1.0 / checked_radius(x, floor); }

PlanarVector potential_gradient(const PlanarVector& x, double floor) {
    const double r = checked_radius(x, floor);
    return x / (r * r * r);
}

Matrix2 potential_hessian(const PlanarVector& x, double floor) {
    const double r = checked_radius(x, floor);
    const double r2 = r * r;
    const double r5 = r2 * r2 * r;
    return {(r2 - 3.0 * x.x1 * x.x1) / r5, -3.0 * x.x1 * x.x2 / r5,  //
            -3.0 * x.x1 * x.x2 / r5, (r2 - 3.0 * x.x2 * x.x2) / r5};
}

PlanarVector force(const PlanarVector& x, double floor) { return -potential_gradient(x, floor); }

double energy(const State& s) {
    return 0.5 * norm_squared(s.velocity) - 1.0 / checked_radius(s.position, kDefaultSingularityFloor);
}

double angular_momentum(const State& s) { return cross(s.position, s.velocity); }

LrlVector lrl(const State& s) {
    const auto& x = s.position;
    const auto& v = s.velocity;
    const double r = checked_radius(x, kDefaultSingularityFloor);
    const double v2 = norm_squared(v);
    const double xv = dot(x, v);
    return {v2 * x.x1 - xv * v.x1 - x.x1 / r, v2 * x.x2 - xv * v.x2 - x.x2 / r};
}

OrbitElements elements_from_state(const State& s) {
    const double E = energy(s);
    if (!(E < 0.0)) {
        std::ostringstream msg;
        msg << "orbit is unbound (energy " << E << " >= 0)";
        throw UnboundOrbit(msg.str());
    }
    const double L = angular_momentum(s);
    if (std::abs(L) <= 1e-14 * norm(s.position) * norm(s.velocity) || L == 0.0) {
        throw DegenerateOrbit("orbit has zero angular momentum");
    }
    const LrlVector lrl_vec = lrl(s);

    OrbitElements el;
    el.energy = E;
    el.angular_momentum = L;
    el.semimajor = -1.0 / (2.0 * E);
    el.semiminor = std::sqrt(L * L * el.semimajor);
    el.period = kTwoPi * std::pow(el.semimajor, 1.5);
    // |LRL| equals sqrt(1 - b^2/a^2) but stays accurate for nearly circular orbits.
    el.eccentricity = lrl_vec.magnitude();
    el.apsis_angle = lrl_vec.angle();
    return el;
}

OrbitElements elements_from_shape(double semimajor, double eccentricity, double rotation_sign,
                                  double apsis_angle) {
    if (!(semimajor > 0.0) || !(eccentricity >= 0.0 && eccentricity < 1.0)) {
        throw std::invalid_argument("elements require a > 0 and 0 <= e < 1");
    }
    OrbitElements el;
    el.semimajor = semimajor;
    el.eccentricity = eccentricity;
    el.semiminor = semimajor * std::sqrt((1.0 - eccentricity) * (1.0 + eccentricity));
    el.energy = -1.0 / (2.0 * semimajor);
    el.period = kTwoPi * std::pow(semimajor, 1.5);
    el.angular_momentum = sign_of(rotation_sign) * el.semiminor / std::sqrt(semimajor);
    el.apsis_angle = apsis_angle;
    return el;
}

State perihelion_state(const OrbitElements& el) {
    const PlanarVector dir{std::cos(el.apsis_angle), std::sin(el.apsis_angle)};
    const double rp = el.semimajor * (1.0 - el.eccentricity);
    const double speed = std::abs(el.angular_momentum) / rp;
    return {rp * dir, sign_of(el.angular_momentum) * speed * perpendicular(dir), 0.0};
}

double solve_kepler_equation(double mean_anomaly, double eccentricity) {
    const double turns = std::floor(mean_anomaly / kTwoPi);
    const double M = mean_anomaly - turns * kTwoPi;
    const double offset = turns * kTwoPi;
    const double e = eccentricity;
    auto residual = [&](double E) { return E - e * std::sin(E) - M; };

    double E = M + e * std::sin(M);
    for (int i = 0; i < kKeplerNewtonIterations; ++i) {
        const double f = residual(E);
        if (std::abs(f) < kKeplerTolerance) return E + offset;
        E -= f / (1.0 - e * std::cos(E));
        if (!(E >= 0.0 && E <= kTwoPi)) break;
    }

    // The residual is monotone in E and changes sign on [0, 2 pi].
    double lo = 0.0;
    double hi = kTwoPi;
    double f = 0.0;
    for (int i = 0; i < kKeplerBisectionIterations; ++i) {
        E = 0.5 * (lo + hi);
        f = residual(E);
        if (std::abs(f) < kKeplerTolerance) return E + offset;
        (f < 0.0 ? lo : hi) = E;
    }
    throw SolverFailure("Kepler's equation did not converge", kKeplerNewtonIterations + kKeplerBisectionIterations,
                        std::abs(f));
}

ExactOrbit::ExactOrbit(const State& initial) : initial_(initial), elements_(elements_from_state(initial)) {
    const double e = elements_.eccentricity;
    if (e > kCircularEccentricity) {
        const LrlVector l = lrl(initial);
        perihelion_dir_ = PlanarVector{l.A, l.B} / e;
    } else {
        perihelion_dir_ = initial.position / norm(initial.position);
    }
    normal_dir_ = sign_of(elements_.angular_momentum) * perpendicular(perihelion_dir_);
    mean_motion_ = kTwoPi / elements_.period;

    const double cos_ecc = dot(initial.position, perihelion_dir_) / elements_.semimajor + e;
    const double sin_ecc = dot(initial.position, normal_dir_) / elements_.semiminor;
    const double ecc = std::atan2(sin_ecc, cos_ecc);
    initial_mean_anomaly_ = ecc - e * std::sin(ecc);
}

State ExactOrbit::state_at(double t) const {
    if (t == initial_.time) return initial_;
    const double a = elements_.semimajor;
    const double b = elements_.semiminor;
    const double e = elements_.eccentricity;
    const double ecc = solve_kepler_equation(initial_mean_anomaly_ + mean_motion_ * (t - initial_.time), e);
    const double c = std::cos(ecc);
    const double s = std::sin(ecc);
    const double ecc_rate = mean_motion_ / (1.0 - e * c);
    return {a * (c - e) * perihelion_dir_ + b * s * normal_dir_,
            ecc_rate * (-a * s * perihelion_dir_ + b * c * normal_dir_), t};
}

State exact_state_at(const OrbitElements& elements, const State& initial, double t) {
    const double E = energy(initial);
    const double L = angular_momentum(initial);
    if (std::abs(E - elements.energy) > 1e-10 * std::max(1.0, std::abs(E)) ||
        std::abs(L - elements.angular_momentum) > 1e-10 * std::max(1.0, std::abs(L))) {
        throw std::invalid_argument("elements are inconsistent with the initial state");
    }
    return ExactOrbit(initial).state_at(t);
}

}  // namespace keplerlab
