// Per-sample formulas shared by the scalar backend and the SIMD tails.
// Everything here has internal linkage: each backend translation unit is
// compiled with its own flags and must keep its own copy.
#pragma once

#include <cmath>
#include <cstddef>

#include "keplerlab/kernels.hpp"

namespace keplerlab::kernels {
namespace {

inline void invariants_at(double x1, double x2, double v1, double v2, double& energy, double& angmom,
                          double& lrl_a, double& lrl_b) {
    const double r = std::sqrt(x1 * x1 + x2 * x2);
    const double w2 = v1 * v1 + v2 * v2;
    const double s = x1 * v1 + x2 * v2;
    energy = 0.5 * w2 - 1.0 / r;
    angmom = x1 * v2 - x2 * v1;
    lrl_a = w2 * x1 - s * v1 - x1 / r;
    lrl_b = w2 * x2 - s * v2 - x2 / r;
}

inline double field_dot_xi_at(const FieldCoefficients& c, double x1, double x2, double v1, double v2) {
    const double r2 = x1 * x1 + x2 * x2;
    const double r = std::sqrt(r2);
    const double s = x1 * v1 + x2 * v2;
    const double w2 = v1 * v1 + v2 * v2;
    const double r5 = r2 * r2 * r;
    const double r6 = r2 * r2 * r2;
    const double r7 = r6 * r;
    const double xcoef = c.c_r6 / r6 + c.c_v2 * w2 / r5 + c.c_s2 * s * s / r7;
    const double vcoef = c.c_sv * s / r5;
    const double f1 = xcoef * x1 + vcoef * v1;
    const double f2 = xcoef * x2 + vcoef * v2;
    const double xi1 = -0.5 * x2 * v2;
    const double xi2 = x1 * v2 - 0.5 * v1 * x2;
    return f1 * xi1 + f2 * xi2;
}

inline double distance_at(double x1, double x2, double y1, double y2) {
    const double d1 = x1 - y1;
    const double d2 = x2 - y2;
    return std::sqrt(d1 * d1 + d2 * d2);
}

/// One-sided second-order derivative at both ends; interior left to the caller.
inline void reconstruct_ends(const double* x, std::size_t n, double two_h, double* v) {
    v[0] = (-3.0 * x[0] + 4.0 * x[1] - x[2]) / two_h;
    v[n - 1] = (3.0 * x[n - 1] - 4.0 * x[n - 2] + x[n - 3]) / two_h;
}

}  // namespace
}  // namespace keplerlab::kernels
