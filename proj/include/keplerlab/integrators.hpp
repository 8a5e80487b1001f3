// Discrete schemes for the Kepler problem.
//
// Two-step methods advance positions only: x_{j+1} = step(x_{j-1}, x_j). All of
// them share the Stormer-Verlet left-hand side x_{j+1} - 2 x_j + x_{j-1} and
// differ in how the potential gradient is sampled on the right. Implicit
// relations are solved by Newton's method with the analytic Hessian.
//
// Kernels are templated on a gradient model so the force-free and constant-force
// hooks used by the tests run through exactly the code the Kepler driver uses.
#pragma once

#include <array>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "keplerlab/errors.hpp"
#include "keplerlab/kepler.hpp"
#include "keplerlab/planar_vector.hpp"

namespace keplerlab {

enum class MethodId { SV, MP, ML, LC, DEC, FR };

inline constexpr std::array<MethodId, 6> kAllMethods{MethodId::SV, MethodId::MP, MethodId::ML,
                                                     MethodId::LC, MethodId::DEC, MethodId::FR};

/// Lower-case short name ("sv", "mp", ...).
std::string_view to_string(MethodId m);
/// Case-insensitive inverse of to_string; throws std::invalid_argument on unknown names.
MethodId parse_method(std::string_view name);

struct SolverConfig {
    double tolerance = 1e-12;  // on the norm of the step residual (position units)
    int max_iterations = 50;

    /// Throws std::invalid_argument unless tolerance > 0 and max_iterations >= 1.
    void validate() const;
};

/// Counts implicit solves and Newton updates; accumulated across calls.
struct SolveStats {
    std::size_t solves = 0;
    std::size_t iterations = 0;
};

template <class G>
concept GradientModel = requires(const G& g, const PlanarVector& x) {
    { g.gradient(x) } -> std::same_as<PlanarVector>;
    { g.hessian(x) } -> std::same_as<Matrix2>;
};

/// U(x) = -1/|x|.
struct KeplerGradient {
    double floor = kDefaultSingularityFloor;
    PlanarVector gradient(const PlanarVector& x) const { return potential_gradient(x, floor); }
    Matrix2 hessian(const PlanarVector& x) const { return potential_hessian(x, floor); }
};

/// U = 0.
struct ZeroGradient {
    PlanarVector gradient(const PlanarVector&) const { return {}; }
    Matrix2 hessian(const PlanarVector&) const { return {}; }
};

/// U(x) = <g, x>.
struct ConstantGradient {
    PlanarVector g;
    PlanarVector gradient(const PlanarVector&) const { return g; }
    Matrix2 hessian(const PlanarVector&) const { return {}; }
};

/// Solves y = base - weight * U'((anchor + y) / 2) for y.
///
/// Starts from `guess`; stops once the residual norm is below cfg.tolerance and
/// then applies the pending Newton correction once more, which leaves the
/// residual at rounding level. Throws SolverFailure after cfg.max_iterations.
template <GradientModel G>
PlanarVector solve_midpoint_relation(const G& grad, const PlanarVector& base, const PlanarVector& anchor,
                                     double weight, PlanarVector guess, const SolverConfig& cfg,
                                     SolveStats* stats = nullptr) {
    PlanarVector y = guess;
    double residual_norm = 0.0;
    for (int it = 0; it <= cfg.max_iterations; ++it) {
        const PlanarVector mid = 0.5 * (anchor + y);
        const PlanarVector residual = y - base + weight * grad.gradient(mid);
        residual_norm = norm(residual);
        if (!std::isfinite(residual_norm)) break;
        if (it == cfg.max_iterations && !(residual_norm < cfg.tolerance)) break;
        const Matrix2 jacobian = Matrix2::identity() + (0.5 * weight) * grad.hessian(mid);
        y -= solve(jacobian, residual);
        if (residual_norm < cfg.tolerance) {
            if (stats) {
                ++stats->solves;
                stats->iterations += static_cast<std::size_t>(it) + 1;
            }
            return y;
        }
    }
    throw SolverFailure("Newton iteration for implicit step did not converge", cfg.max_iterations,
                        residual_norm);
}

/// Stormer-Verlet: x_{k+1} = 2 x_k - x_{k-1} - h^2 U'(x_k).
template <GradientModel G = KeplerGradient>
PlanarVector sv_step(const PlanarVector& prev, const PlanarVector& cur, double h, const G& grad = {}) {
    return 2.0 * cur - prev - (h * h) * grad.gradient(cur);
}

/// Implicit midpoint rule in two-step form:
/// x_{k+1} - 2x_k + x_{k-1} = -h^2/2 [U'((x_k + x_{k+1})/2) + U'((x_{k-1} + x_k)/2)].
template <GradientModel G = KeplerGradient>
PlanarVector mp_step(const PlanarVector& prev, const PlanarVector& cur, double h, const SolverConfig& cfg = {},
                     const G& grad = {}, SolveStats* stats = nullptr) {
    const double h2 = h * h;
    const PlanarVector free_flight = 2.0 * cur - prev;
    const PlanarVector base = free_flight - (0.5 * h2) * grad.gradient(0.5 * (prev + cur));
    return solve_midpoint_relation(grad, base, cur, 0.5 * h2, free_flight, cfg, stats);
}

/// Mixed Lagrangian (2/3 SV + 1/3 MP):
/// x_{j+1} - 2x_j + x_{j-1} = -2h^2/3 U'(x_j) - h^2/6 U'((x_{j-1}+x_j)/2) - h^2/6 U'((x_j+x_{j+1})/2).
template <GradientModel G = KeplerGradient>
PlanarVector ml_step(const PlanarVector& prev, const PlanarVector& cur, double h, const SolverConfig& cfg = {},
                     const G& grad = {}, SolveStats* stats = nullptr) {
    const double h2 = h * h;
    const PlanarVector free_flight = 2.0 * cur - prev;
    const PlanarVector base =
        free_flight - (2.0 * h2 / 3.0) * grad.gradient(cur) - (h2 / 6.0) * grad.gradient(0.5 * (prev + cur));
    return solve_midpoint_relation(grad, base, cur, h2 / 6.0, free_flight, cfg, stats);
}

/// Lagrangian composition; `j` is the index of `cur` and selects the relation by j mod 3.
/// Only the j = 2 (mod 3) relation is implicit; j = 1 (mod 3) is plain Stormer-Verlet.
template <GradientModel G = KeplerGradient>
PlanarVector lc_step(std::size_t j, const PlanarVector& prev, const PlanarVector& cur, double h,
                     const SolverConfig& cfg = {}, const G& grad = {}, SolveStats* stats = nullptr) {
    const double h2 = h * h;
    switch (j % 3) {
        case 1:
            return sv_step(prev, cur, h, grad);
        case 0:
            return 2.0 * cur - prev - (0.5 * h2) * grad.gradient(0.5 * (prev + cur)) - (0.5 * h2) * grad.gradient(cur);
        default: {
            const PlanarVector free_flight = 2.0 * cur - prev;
            const PlanarVector base = free_flight - (0.5 * h2) * grad.gradient(cur);
            return solve_midpoint_relation(grad, base, cur, 0.5 * h2, free_flight, cfg, stats);
        }
    }
}

/// Composition of difference equations: midpoint relation when j = 2 (mod 3), else Stormer-Verlet.
template <GradientModel G = KeplerGradient>
PlanarVector dec_step(std::size_t j, const PlanarVector& prev, const PlanarVector& cur, double h,
                      const SolverConfig& cfg = {}, const G& grad = {}, SolveStats* stats = nullptr) {
    if (j % 3 == 2) return mp_step(prev, cur, h, cfg, grad, stats);
    return sv_step(prev, cur, h, grad);
}

/// Forest-Ruth triple-jump coefficient 1 / (2 - 2^{1/3}).
inline const double kForestRuthTheta = 1.0 / (2.0 - std::cbrt(2.0));

/// One fourth-order Forest-Ruth step: three drift-kick-drift leapfrogs of
/// lengths (theta, 1 - 2 theta, theta) * h.
template <GradientModel G = KeplerGradient>
State fr_step(const State& s, double h, const G& grad = {}) {
    const double theta = kForestRuthTheta;
    const std::array<double, 4> drift{0.5 * theta, 0.5 * (1.0 - theta), 0.5 * (1.0 - theta), 0.5 * theta};
    const std::array<double, 3> kick{theta, 1.0 - 2.0 * theta, theta};
    PlanarVector x = s.position;
    PlanarVector v = s.velocity;
    for (std::size_t i = 0; i < kick.size(); ++i) {
        x += (drift[i] * h) * v;
        v -= (kick[i] * h) * grad.gradient(x);
    }
    x += (drift[3] * h) * v;
    return {x, v, s.time + h};
}

/// Second point x_1 such that the method's discrete momentum at x_0 equals v0.
///
/// SV, LC, DEC: x1 = x0 + h v0 - h^2/2 U'(x0).
/// MP: (x1 - x0)/h + h/2 U'((x0 + x1)/2) = v0.
/// ML: (x1 - x0)/h + h/3 U'(x0) + h/6 U'((x0 + x1)/2) = v0.
/// FR: position after one Forest-Ruth step.
template <GradientModel G = KeplerGradient>
PlanarVector init_second_point(MethodId method, const PlanarVector& x0, const PlanarVector& v0, double h,
                               const SolverConfig& cfg = {}, const G& grad = {}, SolveStats* stats = nullptr) {
    const double h2 = h * h;
    const PlanarVector free_flight = x0 + h * v0;
    switch (method) {
        case MethodId::SV:
        case MethodId::LC:
        case MethodId::DEC:
            return free_flight - (0.5 * h2) * grad.gradient(x0);
        case MethodId::MP:
            return solve_midpoint_relation(grad, free_flight, x0, 0.5 * h2, free_flight, cfg, stats);
        case MethodId::ML: {
            const PlanarVector base = free_flight - (h2 / 3.0) * grad.gradient(x0);
            return solve_midpoint_relation(grad, base, x0, h2 / 6.0, free_flight, cfg, stats);
        }
        case MethodId::FR:
            return fr_step(State{x0, v0, 0.0}, h, grad).position;
    }
    return free_flight;
}

/// Discrete solution x_0 ... x_N of one method at fixed step h.
struct Trajectory {
    MethodId method = MethodId::SV;
    double h = 0.0;
    std::vector<PlanarVector> positions;
    /// Filled only by one-step methods (FR); two-step methods carry positions only.
    std::vector<PlanarVector> velocities;
    PlanarVector start_velocity;
    /// Elements of the exact initial-value problem.
    OrbitElements elements;

    std::size_t steps() const noexcept { return positions.empty() ? 0 : positions.size() - 1; }
    double time(std::size_t k) const noexcept { return static_cast<double>(k) * h; }
    State initial_state() const { return {positions.front(), start_velocity, 0.0}; }
};

/// Failure inside integrate(); carries the trajectory computed so far.
class IntegrationError : public Error {
public:
    enum class Cause { SolverFailure, DomainError };

    IntegrationError(const std::string& what, MethodId method, std::size_t step, Cause cause, Trajectory partial)
        : Error(what), method_(method), step_(step), cause_(cause), partial_(std::move(partial)) {}

    MethodId method() const noexcept { return method_; }
    /// Index of the position that could not be computed.
    std::size_t step() const noexcept { return step_; }
    Cause cause() const noexcept { return cause_; }
    const Trajectory& partial() const noexcept { return partial_; }

private:
    MethodId method_;
    std::size_t step_;
    Cause cause_;
    Trajectory partial_;
};

/// Runs `n_steps` steps of `method` from (x0, v0).
///
/// Throws UnboundOrbit / DegenerateOrbit for invalid initial data, and
/// IntegrationError (with the partial trajectory) if a step fails.
Trajectory integrate(MethodId method, const PlanarVector& x0, const PlanarVector& v0, double h,
                     std::size_t n_steps, const SolverConfig& cfg = {}, SolveStats* stats = nullptr);

/// Velocity at sample k by central differences (x_{k+1} - x_{k-1}) / 2h, with
/// one-sided second-order differences at both ends.
PlanarVector reconstruct_velocity(const Trajectory& traj, std::size_t k);

}  // namespace keplerlab
