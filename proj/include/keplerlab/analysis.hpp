// Observables extracted from trajectories: precession, invariant drift, global
// error against the exact orbit, and log-log convergence slopes.
#pragma once

#include <span>
#include <utility>
#include <vector>

#include "keplerlab/integrators.hpp"

namespace keplerlab {

/// Per-sample observables; velocities are the trajectory's own if it carries
/// them, otherwise central-difference reconstructions.
struct Observables {
    std::vector<double> t, x1, x2, v1, v2;
    std::vector<double> energy, angmom, lrl_a, lrl_b;
    std::vector<double> omega;  // atan2(B, A), unwrapped

    std::size_t size() const noexcept { return t.size(); }
};

/// Needs at least three samples when velocities must be reconstructed.
Observables evaluate_observables(const Trajectory& traj);

/// Adds multiples of 2 pi so consecutive values differ by at most pi.
void unwrap_angles(std::span<double> angles);

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
};

/// Ordinary least squares y = intercept + slope x; needs two distinct x values.
LineFit fit_line(std::span<const double> x, std::span<const double> y);

struct PrecessionEstimate {
    double rate_per_revolution = 0.0;  // radians per revolution
    double slope_per_time = 0.0;       // radians per unit time
    double fit_residual_rms = 0.0;
    double revolutions_observed = 0.0;
};

/// Orientation omega = atan2(B, A) at every interior sample, unwrapped, then
/// averaged over a sliding window of one period (exact integral of the linear
/// interpolant). The slope of the window means against window centres is the
/// drift rate; averaging removes the within-orbit oscillation of the LRL vector.
/// Throws TooFewRevolutions if the trajectory spans less than two periods.
PrecessionEstimate measure_precession(const Trajectory& traj);

enum class Quantity { Energy, AngularMomentum, LrlMagnitude, DiscreteAngularMomentum };

std::string_view to_string(Quantity q);

/// x_k x p_k with p_k the discrete momentum of the trajectory's method; exactly
/// conserved by SV, MP and ML. LC, DEC and FR use the SV form x_k x x_{k+1} / h.
double discrete_angular_momentum(const Trajectory& traj, std::size_t k);

struct DriftReport {
    Quantity quantity = Quantity::Energy;
    double initial_value = 0.0;
    double max_abs_deviation = 0.0;     // max |q_k - q_0|
    double secular_slope = 0.0;         // least-squares slope per unit time
    double oscillation_amplitude = 0.0; // half the range of the detrended series
};

/// DiscreteAngularMomentum is discrete_angular_momentum at k = 0..N-1.
/// Throws std::invalid_argument if N < 10.
DriftReport invariant_drift(const Trajectory& traj, Quantity quantity);

struct ErrorSample {
    double t = 0.0;
    double error = 0.0;
};

/// |x_k - exact position at t_k| for every sample.
std::vector<ErrorSample> error_curve(const Trajectory& traj);

/// Least-squares slope of log|value| against log h. Needs two or more points
/// with distinct positive h; throws SignChange if values are zero or change sign.
double convergence_slope(std::span<const std::pair<double, double>> points);

/// Exact orbit sampled at k h, k = 0..n_steps, packaged as a trajectory.
/// Velocities are attached only if `with_velocities`.
Trajectory exact_trajectory(const PlanarVector& x0, const PlanarVector& v0, double h, std::size_t n_steps,
                            bool with_velocities = false);

}  // namespace keplerlab
