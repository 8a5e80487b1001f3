#include "keplerlab/theory.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "keplerlab/errors.hpp"

namespace keplerlab {

namespace {

constexpr double kReferenceStep = 0.005;
constexpr double kMaxMassMatrixCondition = 1e8;

bool has_correction(MethodId m) { return m == MethodId::SV || m == MethodId::MP; }

double radius_checked(const PlanarVector& x) {
    const double r = std::sqrt(norm_squared(x));
    if (!(r >= kDefaultSingularityFloor)) throw DomainError("position is within the singularity floor", r);
    return r;
}

struct Derivative {
    PlanarVector dx;
    PlanarVector dv;
};

Derivative rhs(const ModifiedModel& m, const PlanarVector& x, const PlanarVector& v) {
    return {v, modified_acceleration(m, State{x, v, 0.0})};
}

struct Rk4Stepper {
    const ModifiedModel& model;
    double step;

    void advance(PlanarVector& x, PlanarVector& v) const {
        const Derivative k1 = rhs(model, x, v);
        const Derivative k2 = rhs(model, x + (0.5 * step) * k1.dx, v + (0.5 * step) * k1.dv);
        const Derivative k3 = rhs(model, x + (0.5 * step) * k2.dx, v + (0.5 * step) * k2.dv);
        const Derivative k4 = rhs(model, x + step * k3.dx, v + step * k3.dv);
        x += (step / 6.0) * (k1.dx + 2.0 * k2.dx + 2.0 * k3.dx + k4.dx);
        v += (step / 6.0) * (k1.dv + 2.0 * k2.dv + 2.0 * k3.dv + k4.dv);
    }
};

// Cubic Hermite interpolation on [a, b] of length k at fraction u.
State hermite(const State& a, const State& b, double k, double u) {
    const double u2 = u * u;
    const double u3 = u2 * u;
    const double h00 = 2.0 * u3 - 3.0 * u2 + 1.0;
    const double h10 = u3 - 2.0 * u2 + u;
    const double h01 = -2.0 * u3 + 3.0 * u2;
    const double h11 = u3 - u2;
    const double d00 = 6.0 * u2 - 6.0 * u;
    const double d10 = 3.0 * u2 - 4.0 * u + 1.0;
    const double d01 = -6.0 * u2 + 6.0 * u;
    const double d11 = 3.0 * u2 - 2.0 * u;
    const PlanarVector x = h00 * a.position + (h10 * k) * a.velocity + h01 * b.position + (h11 * k) * b.velocity;
    const PlanarVector v =
        (d00 / k) * a.position + d10 * a.velocity + (d01 / k) * b.position + d11 * b.velocity;
    return {x, v, a.time + u * k};
}

}  // namespace

void ModifiedModel::validate() const {
    if (!has_correction(base)) throw std::invalid_argument("modified Lagrangians exist for sv and mp only");
    if (!(h >= 0.0) || !std::isfinite(h)) throw std::invalid_argument("step size must be non-negative");
}

CorrectionCoefficients correction_coefficients(MethodId method) {
    switch (method) {
        case MethodId::SV: return {1.0, -2.0, 6.0};
        case MethodId::MP: return {1.0, 1.0, -3.0};
        default: break;
    }
    throw std::invalid_argument("no modified Lagrangian for method " + std::string(to_string(method)));
}

double modified_lagrangian(const ModifiedModel& m, const State& s) {
    m.validate();
    const auto [alpha, beta, gamma] = correction_coefficients(m.base);
    const double r = radius_checked(s.position);
    const double r2 = r * r;
    const double w2 = norm_squared(s.velocity);
    const double xv = dot(s.position, s.velocity);
    const double eps = m.h * m.h / 24.0;
    const double correction = alpha / (r2 * r2) + beta * w2 / (r2 * r) + gamma * xv * xv / (r2 * r2 * r);
    return 0.5 * w2 + 1.0 / r + eps * correction;
}

PlanarVector modified_acceleration(const ModifiedModel& m, const State& s) {
    m.validate();
    const auto [alpha, beta, gamma] = correction_coefficients(m.base);
    const PlanarVector& x = s.position;
    const PlanarVector& v = s.velocity;
    const double r = radius_checked(x);
    const double r2 = r * r;
    const double r3 = r2 * r;
    const double r5 = r3 * r2;
    const double r6 = r3 * r3;
    const double r7 = r5 * r2;
    const double w2 = norm_squared(v);
    const double xv = dot(x, v);
    const double eps = m.h * m.h / 24.0;

    // Velocity Hessian: (1 + 2 eps beta / r^3) I + (2 eps gamma / r^5) x x^T.
    const double iso = 1.0 + 2.0 * eps * beta / r3;
    const double radial = 2.0 * eps * gamma / r5;
    const Matrix2 mass = iso * Matrix2::identity() + radial * Matrix2::outer(x, x);
    const double lambda_perp = std::abs(iso);
    const double lambda_radial = std::abs(iso + radial * r2);
    const double lo = std::min(lambda_perp, lambda_radial);
    const double hi = std::max(lambda_perp, lambda_radial);
    if (!(lo > 0.0) || hi / lo > kMaxMassMatrixCondition) {
        std::ostringstream msg;
        msg << "velocity Hessian of the modified Lagrangian is ill-conditioned (h = " << m.h << ")";
        throw SingularMassMatrix(msg.str(), lo > 0.0 ? hi / lo : INFINITY);
    }

    // dL/dx and the mixed derivative (d^2 L / dv dx) v.
    const PlanarVector dl_dx =
        -x / r3 + eps * ((-4.0 * alpha / r6 - 3.0 * beta * w2 / r5 - 5.0 * gamma * xv * xv / r7) * x +
                         (2.0 * gamma * xv / r5) * v);
    const PlanarVector mixed =
        eps * ((2.0 * gamma * w2 / r5 - 10.0 * gamma * xv * xv / r7) * x + ((2.0 * gamma - 6.0 * beta) * xv / r5) * v);
    return solve(mass, dl_dx - mixed);
}

std::vector<State> integrate_modified(const ModifiedModel& m, const PlanarVector& x0, const PlanarVector& v0,
                                      double t_end, std::span<const double> sample_times) {
    m.validate();
    if (!(t_end > 0.0) || !std::isfinite(t_end)) throw std::invalid_argument("t_end must be positive");
    if (!std::is_sorted(sample_times.begin(), sample_times.end())) {
        throw std::invalid_argument("sample times must be ascending");
    }
    if (!sample_times.empty() && (sample_times.front() < 0.0 || sample_times.back() > t_end)) {
        throw std::invalid_argument("sample times must lie within [0, t_end]");
    }

    const auto n_internal = static_cast<std::size_t>(std::ceil(t_end / kReferenceStep));
    const double k = t_end / static_cast<double>(n_internal);
    const Rk4Stepper stepper{m, k};

    std::vector<State> out;
    out.reserve(sample_times.size());
    State a{x0, v0, 0.0};
    State b = a;
    std::size_t step_index = 0;  // b sits at step_index * k
    auto advance_to = [&](std::size_t target) {
        while (step_index < target) {
            a = b;
            stepper.advance(b.position, b.velocity);
            ++step_index;
            b.time = static_cast<double>(step_index) * k;
        }
    };

    for (double t : sample_times) {
        const double pos = t / k;
        auto target = static_cast<std::size_t>(std::ceil(pos));
        target = std::clamp<std::size_t>(target, 1, n_internal);
        advance_to(target);
        const double u = pos - static_cast<double>(target - 1);
        if (std::abs(u - 1.0) < 1e-9) {
            out.push_back({b.position, b.velocity, t});
        } else if (std::abs(u) < 1e-9) {
            out.push_back({a.position, a.velocity, t});
        } else {
            State s = hermite(a, b, k, u);
            s.time = t;
            out.push_back(s);
        }
    }
    return out;
}

Trajectory sample_modified_trajectory(const ModifiedModel& m, const PlanarVector& x0, const PlanarVector& v0,
                                      double spacing, std::size_t n_steps) {
    if (!(spacing > 0.0)) throw std::invalid_argument("sample spacing must be positive");
    if (n_steps < 1) throw std::invalid_argument("at least one step is required");
    std::vector<double> times(n_steps + 1);
    for (std::size_t k = 0; k <= n_steps; ++k) times[k] = static_cast<double>(k) * spacing;
    const auto states = integrate_modified(m, x0, v0, times.back(), times);

    Trajectory traj;
    traj.method = m.base;
    traj.h = spacing;
    traj.start_velocity = v0;
    traj.elements = elements_from_state(State{x0, v0, 0.0});
    traj.positions.reserve(states.size());
    traj.velocities.reserve(states.size());
    for (const State& s : states) {
        traj.positions.push_back(s.position);
        traj.velocities.push_back(s.velocity);
    }
    return traj;
}

PlanarVector xi_field(const State& s) {
    const auto& x = s.position;
    const auto& v = s.velocity;
    return {-0.5 * x.x2 * v.x2, x.x1 * v.x2 - 0.5 * v.x1 * x.x2};
}

kernels::FieldCoefficients el_field_coefficients(MethodId method) {
    // Variational derivative of alpha/r^4 + beta|v|^2/r^3 + gamma<x,v>^2/r^5 with
    // d/dt evaluated on the unperturbed flow (a = -x/r^3, d<x,v>/dt = |v|^2 - 1/r).
    const auto [alpha, beta, gamma] = correction_coefficients(method);
    return {-4.0 * alpha + 2.0 * beta + 2.0 * gamma, -3.0 * beta - 2.0 * gamma, 6.0 * beta, 5.0 * gamma};
}

PlanarVector el_perturbation_field(MethodId method, const State& s) {
    const auto c = el_field_coefficients(method);
    const PlanarVector& x = s.position;
    const PlanarVector& v = s.velocity;
    const double r = radius_checked(x);
    const double r2 = r * r;
    const double r5 = r2 * r2 * r;
    const double r6 = r2 * r2 * r2;
    const double r7 = r6 * r;
    const double w2 = norm_squared(v);
    const double xv = dot(x, v);
    const double xcoef = c.c_r6 / r6 + c.c_v2 * w2 / r5 + c.c_s2 * xv * xv / r7;
    return xcoef * x + (c.c_sv * xv / r5) * v;
}

double closed_form_average(int k, const OrbitElements& el) {
    const double a = el.semimajor;
    const double b = el.semiminor;
    const double e = el.eccentricity;
    switch (k) {
        case 5: return a / std::pow(b, 5) * e;
        case 6: return a * a / std::pow(b, 7) * (1.5 * e + 0.375 * e * e * e);
        case 7: return a * a * a / std::pow(b, 9) * (2.0 * e + 1.5 * e * e * e);
        default: break;
    }
    throw std::invalid_argument("closed-form averages exist for k = 5, 6, 7 only");
}

std::vector<State> sample_orbit(const OrbitElements& el, std::size_t nodes) {
    const ExactOrbit orbit(perihelion_state(el));
    const double period = orbit.elements().period;
    std::vector<State> out;
    out.reserve(nodes);
    for (std::size_t j = 0; j < nodes; ++j) {
        out.push_back(orbit.state_at(period * static_cast<double>(j) / static_cast<double>(nodes)));
    }
    return out;
}

double orbit_average(const std::function<double(const State&)>& f, const OrbitElements& el, std::size_t nodes) {
    if (nodes < 64) throw std::invalid_argument("orbit averages need at least 64 nodes");
    double sum = 0.0;
    for (const State& s : sample_orbit(el, nodes)) sum += f(s);
    return sum / static_cast<double>(nodes);
}

PrecessionPrediction precession_quadrature(MethodId method, const OrbitElements& el, double h, std::size_t nodes) {
    if (!has_correction(method)) {
        throw std::invalid_argument("precession quadrature is available for sv and mp only");
    }
    if (!(el.eccentricity > 0.0)) throw std::invalid_argument("precession of a circular orbit is undefined");
    if (nodes < 64) throw std::invalid_argument("orbit averages need at least 64 nodes");

    OrbitElements aligned = el;
    aligned.apsis_angle = 0.5 * std::numbers::pi;
    const auto states = sample_orbit(aligned, nodes);
    std::vector<double> x1(nodes), x2(nodes), v1(nodes), v2(nodes), integrand(nodes);
    for (std::size_t j = 0; j < nodes; ++j) {
        x1[j] = states[j].position.x1;
        x2[j] = states[j].position.x2;
        v1[j] = states[j].velocity.x1;
        v2[j] = states[j].velocity.x2;
    }
    kernels::field_dot_xi(el_field_coefficients(method), x1, x2, v1, v2, integrand);
    double sum = 0.0;
    for (double f : integrand) sum += f;
    const double average = sum / static_cast<double>(nodes);

    const double eps = h * h / 24.0;
    const double rate = -2.0 * eps * el.period / el.eccentricity * average;
    return {method, rate, 2, FormulaUsed::Quadrature};
}

PrecessionPrediction precession_theory(MethodId method, const OrbitElements& el, double h) {
    const double a = el.semimajor;
    const double b = el.semiminor;
    const double sgn = el.angular_momentum < 0.0 ? -1.0 : 1.0;
    const double shape = 15.0 * a * a * a / std::pow(b, 6) - 3.0 * a / std::pow(b, 4);
    const double sv_rate = -sgn * std::numbers::pi / 24.0 * shape * h * h;
    switch (method) {
        case MethodId::SV: return {method, sv_rate, 2, FormulaUsed::ClosedForm};
        case MethodId::MP: return {method, -2.0 * sv_rate, 2, FormulaUsed::ClosedForm};
        default: return {method, 0.0, 4, FormulaUsed::ClosedForm};
    }
}

}  // namespace keplerlab
