// Batch kernels over sampled trajectories (structure-of-arrays layout).
//
// Every kernel has a scalar reference implementation and, on x86-64, an AVX2
// implementation. The backend is picked at first use from the CPU's features
// and can be forced with KEPLERLAB_SIMD=scalar|avx2 or set_active_backend().
// Both backends evaluate the same operation sequence without contraction, so
// their results are bitwise identical.
#pragma once

#include <cstddef>
#include <span>
#include <string_view>

namespace keplerlab::kernels {

enum class Backend { Scalar, Avx2 };

std::string_view to_string(Backend b);
bool backend_available(Backend b);
Backend active_backend();
/// Throws std::invalid_argument if `b` is not available on this machine/build.
void set_active_backend(Backend b);

/// Coefficients of a perturbation field
///   c_r6 x/r^6 + c_v2 |v|^2 x/r^5 + c_sv <x,v> v/r^5 + c_s2 <x,v>^2 x/r^7.
struct FieldCoefficients {
    double c_r6 = 0.0;
    double c_v2 = 0.0;
    double c_sv = 0.0;
    double c_s2 = 0.0;
};

/// Function table of one backend; all arrays have length n.
struct KernelTable {
    void (*reconstruct_velocities)(const double* x1, const double* x2, std::size_t n, double h, double* v1,
                                   double* v2);
    void (*evaluate_invariants)(const double* x1, const double* x2, const double* v1, const double* v2,
                                std::size_t n, double* energy, double* angmom, double* lrl_a, double* lrl_b);
    void (*distances)(const double* x1, const double* x2, const double* y1, const double* y2, std::size_t n,
                      double* out);
    void (*field_dot_xi)(const FieldCoefficients& c, const double* x1, const double* x2, const double* v1,
                         const double* v2, std::size_t n, double* out);
    void (*min_radius_squared)(const double* x1, const double* x2, std::size_t n, double* out);
};

/// Throws std::invalid_argument if `b` is not available.
const KernelTable& table(Backend b);

// Span front-ends dispatching to the active backend. Sizes are checked.

/// Central differences with one-sided second-order ends; needs n >= 3.
void reconstruct_velocities(std::span<const double> x1, std::span<const double> x2, double h,
                            std::span<double> v1, std::span<double> v2);

/// Energy, angular momentum and Laplace-Runge-Lenz components per sample.
void evaluate_invariants(std::span<const double> x1, std::span<const double> x2, std::span<const double> v1,
                         std::span<const double> v2, std::span<double> energy, std::span<double> angmom,
                         std::span<double> lrl_a, std::span<double> lrl_b);

/// Euclidean distance between corresponding points.
void distances(std::span<const double> x1, std::span<const double> x2, std::span<const double> y1,
               std::span<const double> y2, std::span<double> out);

/// <field(x, v), xi(x, v)> per sample, with xi = (-x2 v2 / 2, x1 v2 - v1 x2 / 2).
void field_dot_xi(const FieldCoefficients& c, std::span<const double> x1, std::span<const double> x2,
                  std::span<const double> v1, std::span<const double> v2, std::span<double> out);

/// Smallest |x|^2 over the samples (+inf for empty input).
double min_radius_squared(std::span<const double> x1, std::span<const double> x2);

}  // namespace keplerlab::kernels
