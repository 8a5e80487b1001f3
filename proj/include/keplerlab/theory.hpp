// Backward error analysis of Stormer-Verlet and the midpoint rule on the Kepler
// problem: second-order modified Lagrangians, their Euler-Lagrange flow, the
// Noether vector field generating the Laplace-Runge-Lenz component A, orbit
// averages, and the resulting precession-rate predictions.
#pragma once

#include <functional>
#include <span>
#include <vector>

#include "keplerlab/integrators.hpp"
#include "keplerlab/kepler.hpp"
#include "keplerlab/kernels.hpp"

namespace keplerlab {

/// Kepler Lagrangian plus the O(h^2) correction of SV or MP:
///   1/2 |v|^2 + 1/|x| + (h^2/24) (alpha/|x|^4 + beta |v|^2/|x|^3 + gamma <x,v>^2/|x|^5)
/// with (alpha, beta, gamma) = (1, -2, 6) for SV and (1, 1, -3) for MP.
struct ModifiedModel {
    MethodId base = MethodId::SV;
    double h = 0.0;

    /// Throws std::invalid_argument unless base is SV or MP and h >= 0.
    void validate() const;
};

/// Coefficients (alpha, beta, gamma) of the correction term above.
struct CorrectionCoefficients {
    double alpha = 0.0;
    double beta = 0.0;
    double gamma = 0.0;
};

/// Throws std::invalid_argument for methods without a printed correction (anything but SV, MP).
CorrectionCoefficients correction_coefficients(MethodId method);

double modified_lagrangian(const ModifiedModel& m, const State& s);

/// Acceleration from the Euler-Lagrange equations of modified_lagrangian.
/// Throws SingularMassMatrix if the velocity Hessian has condition number > 1e8.
PlanarVector modified_acceleration(const ModifiedModel& m, const State& s);

/// Integrates the modified equation with classical RK4 at internal step
/// t_end / ceil(t_end / 0.005) and returns states at `sample_times` (ascending,
/// within [0, t_end]) by cubic Hermite interpolation between internal steps.
std::vector<State> integrate_modified(const ModifiedModel& m, const PlanarVector& x0, const PlanarVector& v0,
                                      double t_end, std::span<const double> sample_times);

/// Modified-equation solution sampled at k * spacing, k = 0..n_steps, packaged
/// as a trajectory (with velocities) so it can be analysed like a numerical one.
Trajectory sample_modified_trajectory(const ModifiedModel& m, const PlanarVector& x0, const PlanarVector& v0,
                                      double spacing, std::size_t n_steps);

/// Noether field xi = (-x2 v2 / 2, x1 v2 - v1 x2 / 2) whose conserved quantity is A.
PlanarVector xi_field(const State& s);

/// Euler-Lagrange expression of the correction term of SV or MP, evaluated with
/// the unperturbed equations of motion substituted for the acceleration.
/// SV: 4x/r^6 - 6|v|^2 x/r^5 + 30<x,v>^2 x/r^7 - 12<x,v> v/r^5.
PlanarVector el_perturbation_field(MethodId method, const State& s);

/// el_perturbation_field as batch-kernel coefficients.
kernels::FieldCoefficients el_field_coefficients(MethodId method);

/// Closed-form average of x2/|x|^k over an orbit whose perihelion lies on the
/// positive x2-axis, for k in {5, 6, 7}. Throws std::invalid_argument otherwise.
double closed_form_average(int k, const OrbitElements& el);

/// Exact orbit described by `el`, sampled at `nodes` uniformly spaced times over one period.
std::vector<State> sample_orbit(const OrbitElements& el, std::size_t nodes);

/// Time average of f over one period of the exact orbit `el` (periodic trapezoid rule).
/// Throws std::invalid_argument if nodes < 64.
double orbit_average(const std::function<double(const State&)>& f, const OrbitElements& el,
                     std::size_t nodes = 2048);

enum class FormulaUsed { ClosedForm, Quadrature };

struct PrecessionPrediction {
    MethodId method = MethodId::SV;
    double rate_per_revolution = 0.0;  // radians per revolution
    int leading_order = 2;
    FormulaUsed formula = FormulaUsed::ClosedForm;
};

/// Delta omega = -(2 eps T / e) [<EL(correction), xi>] with eps = h^2/24, averaged
/// over the orbit rotated so that its perihelion lies on the positive x2-axis.
/// SV and MP only; requires e > 0.
PrecessionPrediction precession_quadrature(MethodId method, const OrbitElements& el, double h,
                                           std::size_t nodes = 2048);

/// Closed-form leading-order precession per revolution:
///   SV: -sgn(L) (pi/24) (15 a^3/b^6 - 3a/b^4) h^2,  MP: -2 times that.
/// ML, LC, DEC and FR have no h^2 term; they report 0 with leading order 4.
PrecessionPrediction precession_theory(MethodId method, const OrbitElements& el, double h);

}  // namespace keplerlab
