#include "keplerlab/integrators.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>
#include <stdexcept>
#include <utility>

namespace keplerlab {

std::string_view to_string(MethodId m) {
    switch (m) {
        case MethodId::SV: return "sv";
        case MethodId::MP: return "mp";
        case MethodId::ML: return "ml";
        case MethodId::LC: return "lc";
        case MethodId::DEC: return "dec";
        case MethodId::FR: return "fr";
    }
    return "?";
}

MethodId parse_method(std::string_view name) {
    std::string lower(name);
    std::transform(lower.begin(), lower.end(), lower.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    for (MethodId m : kAllMethods) {
        if (to_string(m) == lower) return m;
    }
    throw std::invalid_argument("unknown method '" + std::string(name) + "' (expected sv, mp, ml, lc, dec or fr)");
}

void SolverConfig::validate() const {
    if (!(tolerance > 0.0)) throw std::invalid_argument("solver tolerance must be positive");
    if (max_iterations < 1) throw std::invalid_argument("solver max iterations must be at least 1");
}

namespace {

PlanarVector advance(MethodId method, std::size_t j, const PlanarVector& prev, const PlanarVector& cur, double h,
                     const SolverConfig& cfg, SolveStats* stats) {
    const KeplerGradient grad;
    switch (method) {
        case MethodId::SV: return sv_step(prev, cur, h, grad);
        case MethodId::MP: return mp_step(prev, cur, h, cfg, grad, stats);
        case MethodId::ML: return ml_step(prev, cur, h, cfg, grad, stats);
        case MethodId::LC: return lc_step(j, prev, cur, h, cfg, grad, stats);
        case MethodId::DEC: return dec_step(j, prev, cur, h, cfg, grad, stats);
        case MethodId::FR: break;
    }
    throw std::logic_error("advance() called for a one-step method");
}

[[noreturn]] void rethrow_with_step(MethodId method, std::size_t step, Trajectory&& partial) {
    std::ostringstream msg;
    msg << to_string(method) << " failed at step " << step << ": ";
    try {
        throw;
    } catch (const SolverFailure& e) {
        msg << e.what();
        throw IntegrationError(msg.str(), method, step, IntegrationError::Cause::SolverFailure, std::move(partial));
    } catch (const DomainError& e) {
        msg << e.what();
        throw IntegrationError(msg.str(), method, step, IntegrationError::Cause::DomainError, std::move(partial));
    }
}

}  // namespace

Trajectory integrate(MethodId method, const PlanarVector& x0, const PlanarVector& v0, double h,
                     std::size_t n_steps, const SolverConfig& cfg, SolveStats* stats) {
    if (!(h > 0.0) || !std::isfinite(h)) throw std::invalid_argument("step size must be positive");
    if (n_steps < 1) throw std::invalid_argument("at least one step is required");
    cfg.validate();

    Trajectory traj;
    traj.method = method;
    traj.h = h;
    traj.start_velocity = v0;
    traj.elements = elements_from_state(State{x0, v0, 0.0});
    traj.positions.reserve(n_steps + 1);
    traj.positions.push_back(x0);

    if (method == MethodId::FR) {
        traj.velocities.reserve(n_steps + 1);
        traj.velocities.push_back(v0);
        State s{x0, v0, 0.0};
        for (std::size_t k = 1; k <= n_steps; ++k) {
            try {
                s = fr_step(s, h);
            } catch (const Error&) {
                rethrow_with_step(method, k, std::move(traj));
            }
            traj.positions.push_back(s.position);
            traj.velocities.push_back(s.velocity);
        }
        return traj;
    }

    try {
        traj.positions.push_back(init_second_point(method, x0, v0, h, cfg, KeplerGradient{}, stats));
    } catch (const Error&) {
        rethrow_with_step(method, 1, std::move(traj));
    }
    for (std::size_t j = 1; j < n_steps; ++j) {
        PlanarVector next;
        try {
            next = advance(method, j, traj.positions[j - 1], traj.positions[j], h, cfg, stats);
        } catch (const Error&) {
            rethrow_with_step(method, j + 1, std::move(traj));
        }
        traj.positions.push_back(next);
    }
    return traj;
}

PlanarVector reconstruct_velocity(const Trajectory& traj, std::size_t k) {
    const std::size_t n = traj.steps();
    if (n < 2) throw std::invalid_argument("velocity reconstruction needs at least three samples");
    if (k > n) throw std::out_of_range("sample index out of range");
    const auto& x = traj.positions;
    const double two_h = 2.0 * traj.h;
    if (k == 0) return (-3.0 * x[0] + 4.0 * x[1] - x[2]) / two_h;
    if (k == n) return (3.0 * x[n] - 4.0 * x[n - 1] + x[n - 2]) / two_h;
    return (x[k + 1] - x[k - 1]) / two_h;
}

}  // namespace keplerlab
