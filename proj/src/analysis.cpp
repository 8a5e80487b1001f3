#include "keplerlab/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "keplerlab/errors.hpp"
#include "keplerlab/kernels.hpp"

namespace keplerlab {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Integral of the piecewise-linear interpolant of (t_i, y_i), uniform spacing h,
// from t_0 to t, given the cumulative trapezoid sums at the nodes.
double cumulative_at(std::span<const double> y, std::span<const double> cum, double t0, double h, double t) {
    const double pos = (t - t0) / h;
    auto m = static_cast<std::size_t>(std::floor(pos));
    if (m >= y.size() - 1) m = y.size() - 2;
    const double d = t - (t0 + static_cast<double>(m) * h);
    return cum[m] + y[m] * d + 0.5 * (y[m + 1] - y[m]) / h * d * d;
}

// Weight w in x_k x p_k = (x_k x x_{k+1} / h)(1 + w h^2 / |midpoint|^3), where
// p_k is the discrete momentum of the method's discrete Lagrangian.
double midpoint_momentum_weight(MethodId m) {
    switch (m) {
        case MethodId::MP: return 0.25;
        case MethodId::ML: return 1.0 / 12.0;
        default: return 0.0;
    }
}

}  // namespace

double discrete_angular_momentum(const Trajectory& traj, std::size_t k) {
    if (k + 1 >= traj.positions.size()) throw std::out_of_range("discrete angular momentum needs x_{k+1}");
    const PlanarVector& a = traj.positions[k];
    const PlanarVector& b = traj.positions[k + 1];
    const double h = traj.h;
    const double w = midpoint_momentum_weight(traj.method);
    double factor = 1.0;
    if (w != 0.0) {
        const double r = norm(0.5 * (a + b));
        factor += w * h * h / (r * r * r);
    }
    return cross(a, b) / h * factor;
}

Observables evaluate_observables(const Trajectory& traj) {
    const std::size_t n = traj.positions.size();
    Observables o;
    o.t.resize(n);
    o.x1.resize(n);
    o.x2.resize(n);
    o.v1.resize(n);
    o.v2.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
        o.t[k] = traj.time(k);
        o.x1[k] = traj.positions[k].x1;
        o.x2[k] = traj.positions[k].x2;
    }
    if (!traj.velocities.empty()) {
        if (traj.velocities.size() != n) throw std::invalid_argument("velocity samples do not match positions");
        for (std::size_t k = 0; k < n; ++k) {
            o.v1[k] = traj.velocities[k].x1;
            o.v2[k] = traj.velocities[k].x2;
        }
    } else if (n >= 3) {
        kernels::reconstruct_velocities(o.x1, o.x2, traj.h, o.v1, o.v2);
    } else if (n == 2) {
        const PlanarVector v = (traj.positions[1] - traj.positions[0]) / traj.h;
        o.v1.assign(2, v.x1);
        o.v2.assign(2, v.x2);
    } else if (n == 1) {
        o.v1[0] = traj.start_velocity.x1;
        o.v2[0] = traj.start_velocity.x2;
    }
    o.energy.resize(n);
    o.angmom.resize(n);
    o.lrl_a.resize(n);
    o.lrl_b.resize(n);
    kernels::evaluate_invariants(o.x1, o.x2, o.v1, o.v2, o.energy, o.angmom, o.lrl_a, o.lrl_b);
    o.omega.resize(n);
    for (std::size_t k = 0; k < n; ++k) o.omega[k] = std::atan2(o.lrl_b[k], o.lrl_a[k]);
    unwrap_angles(o.omega);
    return o;
}

void unwrap_angles(std::span<double> angles) {
    double offset = 0.0;
    for (std::size_t k = 1; k < angles.size(); ++k) {
        const double raw_prev = angles[k - 1] - offset;
        const double jump = angles[k] - raw_prev;
        offset -= kTwoPi * std::round(jump / kTwoPi);
        angles[k] += offset;
    }
}

LineFit fit_line(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("line fit needs two or more points");
    const auto n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (!(sxx > 0.0)) throw std::invalid_argument("line fit needs distinct abscissae");
    const double slope = sxy / sxx;
    return {slope, my - slope * mx};
}

PrecessionEstimate measure_precession(const Trajectory& traj) {
    const double period = traj.elements.period;
    const double span = static_cast<double>(traj.steps()) * traj.h;
    const double revolutions = span / period;
    if (!(revolutions >= 2.0)) {
        std::ostringstream msg;
        msg << "trajectory spans " << revolutions << " revolutions; at least 2 are needed";
        throw TooFewRevolutions(msg.str(), revolutions);
    }

    const Observables o = evaluate_observables(traj);
    const std::size_t n = o.size();
    // Interior samples only: the one-sided end velocities are less accurate.
    const std::span<const double> t(o.t.data() + 1, n - 2);
    std::vector<double> omega(o.omega.begin() + 1, o.omega.end() - 1);
    const double h = traj.h;

    std::vector<double> cum(omega.size(), 0.0);
    for (std::size_t i = 1; i < omega.size(); ++i) cum[i] = cum[i - 1] + 0.5 * h * (omega[i - 1] + omega[i]);

    std::vector<double> centres, means;
    const double t_last = t.back();
    for (std::size_t i = 0; i < omega.size() && t[i] + period <= t_last; ++i) {
        const double integral = cumulative_at(omega, cum, t.front(), h, t[i] + period) - cum[i];
        centres.push_back(t[i] + 0.5 * period);
        means.push_back(integral / period);
    }
    if (centres.size() < 2) {
        throw TooFewRevolutions("step size too large to resolve one-period averages", revolutions);
    }
    const LineFit fit = fit_line(centres, means);

    double sq = 0.0;
    for (std::size_t i = 0; i < omega.size(); ++i) {
        const double r = omega[i] - (fit.intercept + fit.slope * t[i]);
        sq += r * r;
    }
    return {fit.slope * period, fit.slope, std::sqrt(sq / static_cast<double>(omega.size())), revolutions};
}

std::string_view to_string(Quantity q) {
    switch (q) {
        case Quantity::Energy: return "energy";
        case Quantity::AngularMomentum: return "angular-momentum";
        case Quantity::LrlMagnitude: return "lrl-magnitude";
        case Quantity::DiscreteAngularMomentum: return "discrete-angular-momentum";
    }
    return "?";
}

DriftReport invariant_drift(const Trajectory& traj, Quantity quantity) {
    const std::size_t steps = traj.steps();
    if (steps < 10) throw std::invalid_argument("invariant drift needs at least 10 steps");

    std::vector<double> t, q;
    if (quantity == Quantity::DiscreteAngularMomentum) {
        t.resize(steps);
        q.resize(steps);
        for (std::size_t k = 0; k < steps; ++k) {
            t[k] = traj.time(k);
            q[k] = discrete_angular_momentum(traj, k);
        }
    } else {
        Observables o = evaluate_observables(traj);
        t = std::move(o.t);
        switch (quantity) {
            case Quantity::Energy: q = std::move(o.energy); break;
            case Quantity::AngularMomentum: q = std::move(o.angmom); break;
            default:
                q.resize(t.size());
                for (std::size_t k = 0; k < q.size(); ++k) q[k] = std::hypot(o.lrl_a[k], o.lrl_b[k]);
                break;
        }
    }

    DriftReport rep;
    rep.quantity = quantity;
    rep.initial_value = q.front();
    for (double v : q) rep.max_abs_deviation = std::max(rep.max_abs_deviation, std::abs(v - q.front()));
    const LineFit fit = fit_line(t, q);
    rep.secular_slope = fit.slope;
    double lo = INFINITY, hi = -INFINITY;
    for (std::size_t k = 0; k < q.size(); ++k) {
        const double r = q[k] - (fit.intercept + fit.slope * t[k]);
        lo = std::min(lo, r);
        hi = std::max(hi, r);
    }
    rep.oscillation_amplitude = std::min(0.5 * (hi - lo), rep.max_abs_deviation);
    return rep;
}

std::vector<ErrorSample> error_curve(const Trajectory& traj) {
    const std::size_t n = traj.positions.size();
    if (n == 0) return {};
    const ExactOrbit orbit(traj.initial_state());
    std::vector<double> x1(n), x2(n), y1(n), y2(n), err(n);
    for (std::size_t k = 0; k < n; ++k) {
        const PlanarVector exact = orbit.state_at(traj.time(k)).position;
        x1[k] = traj.positions[k].x1;
        x2[k] = traj.positions[k].x2;
        y1[k] = exact.x1;
        y2[k] = exact.x2;
    }
    kernels::distances(x1, x2, y1, y2, err);
    std::vector<ErrorSample> out(n);
    for (std::size_t k = 0; k < n; ++k) out[k] = {traj.time(k), err[k]};
    return out;
}

double convergence_slope(std::span<const std::pair<double, double>> points) {
    if (points.size() < 2) throw std::invalid_argument("convergence slope needs at least two points");
    const double sign = points.front().second > 0.0 ? 1.0 : -1.0;
    std::vector<double> lx, ly;
    for (const auto& [h, value] : points) {
        if (!(h > 0.0)) throw std::invalid_argument("step sizes must be positive");
        if (!(value * sign > 0.0)) throw SignChange("values change sign or vanish; log-log slope undefined");
        lx.push_back(std::log(h));
        ly.push_back(std::log(std::abs(value)));
    }
    return fit_line(lx, ly).slope;
}

Trajectory exact_trajectory(const PlanarVector& x0, const PlanarVector& v0, double h, std::size_t n_steps,
                            bool with_velocities) {
    if (!(h > 0.0)) throw std::invalid_argument("step size must be positive");
    const ExactOrbit orbit(State{x0, v0, 0.0});
    Trajectory traj;
    traj.method = MethodId::SV;
    traj.h = h;
    traj.start_velocity = v0;
    traj.elements = orbit.elements();
    traj.positions.reserve(n_steps + 1);
    for (std::size_t k = 0; k <= n_steps; ++k) {
        const State s = orbit.state_at(static_cast<double>(k) * h);
        traj.positions.push_back(s.position);
        if (with_velocities) traj.velocities.push_back(s.velocity);
    }
    return traj;
}

}  // namespace keplerlab
