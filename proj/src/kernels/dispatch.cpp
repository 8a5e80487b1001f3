#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>
#include <string_view>

#include "backends.hpp"
#include "keplerlab/kernels.hpp"

namespace keplerlab::kernels {

namespace {

bool cpu_has_avx2() {
#if defined(KEPLERLAB_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
    return __builtin_cpu_supports("avx2");
#else
    return false;
#endif
}

Backend initial_backend() {
    const char* forced = std::getenv("KEPLERLAB_SIMD");
    if (forced != nullptr) {
        const std::string_view name(forced);
        if (name == "scalar") return Backend::Scalar;
        if (name == "avx2" && backend_available(Backend::Avx2)) return Backend::Avx2;
    }
    return backend_available(Backend::Avx2) ? Backend::Avx2 : Backend::Scalar;
}

std::atomic<Backend>& active_slot() {
    static std::atomic<Backend> slot{initial_backend()};
    return slot;
}

void require_size(std::size_t expected, std::size_t actual) {
    if (expected != actual) throw std::invalid_argument("kernel arrays must have equal length");
}

}  // namespace

std::string_view to_string(Backend b) {
    switch (b) {
        case Backend::Scalar: return "scalar";
        case Backend::Avx2: return "avx2";
    }
    return "?";
}

bool backend_available(Backend b) { return b == Backend::Scalar || cpu_has_avx2(); }

Backend active_backend() { return active_slot().load(std::memory_order_relaxed); }

void set_active_backend(Backend b) {
    if (!backend_available(b)) {
        throw std::invalid_argument("kernel backend '" + std::string(to_string(b)) + "' is not available");
    }
    active_slot().store(b, std::memory_order_relaxed);
}

const KernelTable& table(Backend b) {
    if (!backend_available(b)) {
        throw std::invalid_argument("kernel backend '" + std::string(to_string(b)) + "' is not available");
    }
#if defined(KEPLERLAB_HAVE_AVX2)
    if (b == Backend::Avx2) return detail::avx2_table();
#endif
    return detail::scalar_table();
}

void reconstruct_velocities(std::span<const double> x1, std::span<const double> x2, double h,
                            std::span<double> v1, std::span<double> v2) {
    const std::size_t n = x1.size();
    require_size(n, x2.size());
    require_size(n, v1.size());
    require_size(n, v2.size());
    if (n < 3) throw std::invalid_argument("velocity reconstruction needs at least three samples");
    table(active_backend()).reconstruct_velocities(x1.data(), x2.data(), n, h, v1.data(), v2.data());
}

void evaluate_invariants(std::span<const double> x1, std::span<const double> x2, std::span<const double> v1,
                         std::span<const double> v2, std::span<double> energy, std::span<double> angmom,
                         std::span<double> lrl_a, std::span<double> lrl_b) {
    const std::size_t n = x1.size();
    for (std::size_t m : {x2.size(), v1.size(), v2.size(), energy.size(), angmom.size(), lrl_a.size(),
                          lrl_b.size()}) {
        require_size(n, m);
    }
    table(active_backend())
        .evaluate_invariants(x1.data(), x2.data(), v1.data(), v2.data(), n, energy.data(), angmom.data(),
                             lrl_a.data(), lrl_b.data());
}

void distances(std::span<const double> x1, std::span<const double> x2, std::span<const double> y1,
               std::span<const double> y2, std::span<double> out) {
    const std::size_t n = x1.size();
    for (std::size_t m : {x2.size(), y1.size(), y2.size(), out.size()}) require_size(n, m);
    table(active_backend()).distances(x1.data(), x2.data(), y1.data(), y2.data(), n, out.data());
}

void field_dot_xi(const FieldCoefficients& c, std::span<const double> x1, std::span<const double> x2,
                  std::span<const double> v1, std::span<const double> v2, std::span<double> out) {
    const std::size_t n = x1.size();
    for (std::size_t m : {x2.size(), v1.size(), v2.size(), out.size()}) require_size(n, m);
    table(active_backend()).field_dot_xi(c, x1.data(), x2.data(), v1.data(), v2.data(), n, out.data());
}

double min_radius_squared(std::span<const double> x1, std::span<const double> x2) {
    require_size(x1.size(), x2.size());
    double out = 0.0;
    table(active_backend()).min_radius_squared(x1.data(), x2.data(), x1.size(), &out);
    return out;
}

}  // namespace keplerlab::kernels
