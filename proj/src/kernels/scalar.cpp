// Reference implementations of the batch kernels.
#include <algorithm>
#include <limits>

#include "backends.hpp"
#include "element_ops.hpp"

namespace keplerlab::kernels::detail {
namespace {

void reconstruct_velocities(const double* x1, const double* x2, std::size_t n, double h, double* v1, double* v2) {
    const double two_h = 2.0 * h;
    for (std::size_t k = 1; k + 1 < n; ++k) {
        v1[k] = (x1[k + 1] - x1[k - 1]) / two_h;
        v2[k] = (x2[k + 1] - x2[k - 1]) / two_h;
    }
    reconstruct_ends(x1, n, two_h, v1);
    reconstruct_ends(x2, n, two_h, v2);
}

void evaluate_invariants(const double* x1, const double* x2, const double* v1, const double* v2, std::size_t n,
                         double* energy, double* angmom, double* lrl_a, double* lrl_b) {
    for (std::size_t i = 0; i < n; ++i) {
        invariants_at(x1[i], x2[i], v1[i], v2[i], energy[i], angmom[i], lrl_a[i], lrl_b[i]);
    }
}

void distances(const double* x1, const double* x2, const double* y1, const double* y2, std::size_t n,
               double* out) {
    for (std::size_t i = 0; i < n; ++i) out[i] = distance_at(x1[i], x2[i], y1[i], y2[i]);
}

void field_dot_xi(const FieldCoefficients& c, const double* x1, const double* x2, const double* v1,
                  const double* v2, std::size_t n, double* out) {
    for (std::size_t i = 0; i < n; ++i) out[i] = field_dot_xi_at(c, x1[i], x2[i], v1[i], v2[i]);
}

void min_radius_squared(const double* x1, const double* x2, std::size_t n, double* out) {
    double m = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) m = std::min(m, x1[i] * x1[i] + x2[i] * x2[i]);
    *out = m;
}

}  // namespace

const KernelTable& scalar_table() {
    static const KernelTable t{reconstruct_velocities, evaluate_invariants, distances, field_dot_xi,
                               min_radius_squared};
    return t;
}

}  // namespace keplerlab::kernels::detail
