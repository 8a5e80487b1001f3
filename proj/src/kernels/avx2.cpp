// AVX2 implementations of the batch kernels: four samples per iteration, the
// remainder through the shared per-sample formulas.
#include <immintrin.h>

#include <algorithm>
#include <limits>

#include "backends.hpp"
#include "element_ops.hpp"

namespace keplerlab::kernels::detail {
namespace {

constexpr std::size_t kLanes = 4;

inline __m256d mul(__m256d a, __m256d b) { return _mm256_mul_pd(a, b); }
inline __m256d add(__m256d a, __m256d b) { return _mm256_add_pd(a, b); }
inline __m256d sub(__m256d a, __m256d b) { return _mm256_sub_pd(a, b); }
inline __m256d div(__m256d a, __m256d b) { return _mm256_div_pd(a, b); }
inline __m256d splat(double v) { return _mm256_set1_pd(v); }

void reconstruct_velocities(const double* x1, const double* x2, std::size_t n, double h, double* v1, double* v2) {
    const double two_h = 2.0 * h;
    const __m256d vtwo_h = splat(two_h);
    std::size_t k = 1;
    for (; k + kLanes < n; k += kLanes) {
        _mm256_storeu_pd(v1 + k, div(sub(_mm256_loadu_pd(x1 + k + 1), _mm256_loadu_pd(x1 + k - 1)), vtwo_h));
        _mm256_storeu_pd(v2 + k, div(sub(_mm256_loadu_pd(x2 + k + 1), _mm256_loadu_pd(x2 + k - 1)), vtwo_h));
    }
    for (; k + 1 < n; ++k) {
        v1[k] = (x1[k + 1] - x1[k - 1]) / two_h;
        v2[k] = (x2[k + 1] - x2[k - 1]) / two_h;
    }
    reconstruct_ends(x1, n, two_h, v1);
    reconstruct_ends(x2, n, two_h, v2);
}

void evaluate_invariants(const double* x1, const double* x2, const double* v1, const double* v2, std::size_t n,
                         double* energy, double* angmom, double* lrl_a, double* lrl_b) {
    const __m256d half = splat(0.5);
    const __m256d one = splat(1.0);
    std::size_t i = 0;
    for (; i + kLanes <= n; i += kLanes) {
        const __m256d px = _mm256_loadu_pd(x1 + i);
        const __m256d py = _mm256_loadu_pd(x2 + i);
        const __m256d qx = _mm256_loadu_pd(v1 + i);
        const __m256d qy = _mm256_loadu_pd(v2 + i);
        const __m256d r = _mm256_sqrt_pd(add(mul(px, px), mul(py, py)));
        const __m256d w2 = add(mul(qx, qx), mul(qy, qy));
        const __m256d s = add(mul(px, qx), mul(py, qy));
        _mm256_storeu_pd(energy + i, sub(mul(half, w2), div(one, r)));
        _mm256_storeu_pd(angmom + i, sub(mul(px, qy), mul(py, qx)));
        _mm256_storeu_pd(lrl_a + i, sub(sub(mul(w2, px), mul(s, qx)), div(px, r)));
        _mm256_storeu_pd(lrl_b + i, sub(sub(mul(w2, py), mul(s, qy)), div(py, r)));
    }
    for (; i < n; ++i) invariants_at(x1[i], x2[i], v1[i], v2[i], energy[i], angmom[i], lrl_a[i], lrl_b[i]);
}

void distances(const double* x1, const double* x2, const double* y1, const double* y2, std::size_t n,
               double* out) {
    std::size_t i = 0;
    for (; i + kLanes <= n; i += kLanes) {
        const __m256d d1 = sub(_mm256_loadu_pd(x1 + i), _mm256_loadu_pd(y1 + i));
        const __m256d d2 = sub(_mm256_loadu_pd(x2 + i), _mm256_loadu_pd(y2 + i));
        _mm256_storeu_pd(out + i, _mm256_sqrt_pd(add(mul(d1, d1), mul(d2, d2))));
    }
    for (; i < n; ++i) out[i] = distance_at(x1[i], x2[i], y1[i], y2[i]);
}

void field_dot_xi(const FieldCoefficients& c, const double* x1, const double* x2, const double* v1,
                  const double* v2, std::size_t n, double* out) {
    const __m256d c_r6 = splat(c.c_r6);
    const __m256d c_v2 = splat(c.c_v2);
    const __m256d c_sv = splat(c.c_sv);
    const __m256d c_s2 = splat(c.c_s2);
    const __m256d minus_half = splat(-0.5);
    const __m256d half = splat(0.5);
    std::size_t i = 0;
    for (; i + kLanes <= n; i += kLanes) {
        const __m256d px = _mm256_loadu_pd(x1 + i);
        const __m256d py = _mm256_loadu_pd(x2 + i);
        const __m256d qx = _mm256_loadu_pd(v1 + i);
        const __m256d qy = _mm256_loadu_pd(v2 + i);
        const __m256d r2 = add(mul(px, px), mul(py, py));
        const __m256d r = _mm256_sqrt_pd(r2);
        const __m256d s = add(mul(px, qx), mul(py, qy));
        const __m256d w2 = add(mul(qx, qx), mul(qy, qy));
        const __m256d r5 = mul(mul(r2, r2), r);
        const __m256d r6 = mul(mul(r2, r2), r2);
        const __m256d r7 = mul(r6, r);
        const __m256d xcoef =
            add(add(div(c_r6, r6), div(mul(c_v2, w2), r5)), div(mul(mul(c_s2, s), s), r7));
        const __m256d vcoef = div(mul(c_sv, s), r5);
        const __m256d f1 = add(mul(xcoef, px), mul(vcoef, qx));
        const __m256d f2 = add(mul(xcoef, py), mul(vcoef, qy));
        const __m256d xi1 = mul(mul(minus_half, py), qy);
        const __m256d xi2 = sub(mul(px, qy), mul(mul(half, qx), py));
        _mm256_storeu_pd(out + i, add(mul(f1, xi1), mul(f2, xi2)));
    }
    for (; i < n; ++i) out[i] = field_dot_xi_at(c, x1[i], x2[i], v1[i], v2[i]);
}

void min_radius_squared(const double* x1, const double* x2, std::size_t n, double* out) {
    __m256d acc = splat(std::numeric_limits<double>::infinity());
    std::size_t i = 0;
    for (; i + kLanes <= n; i += kLanes) {
        const __m256d px = _mm256_loadu_pd(x1 + i);
        const __m256d py = _mm256_loadu_pd(x2 + i);
        acc = _mm256_min_pd(acc, add(mul(px, px), mul(py, py)));
    }
    alignas(32) double lanes[kLanes];
    _mm256_store_pd(lanes, acc);
    double m = std::min(std::min(lanes[0], lanes[1]), std::min(lanes[2], lanes[3]));
    for (; i < n; ++i) m = std::min(m, x1[i] * x1[i] + x2[i] * x2[i]);
    *out = m;
}

}  // namespace

const KernelTable& avx2_table() {
    static const KernelTable t{reconstruct_velocities, evaluate_invariants, distances, field_dot_xi,
                               min_radius_squared};
    return t;
}

}  // namespace keplerlab::kernels::detail
