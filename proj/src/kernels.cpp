#include "lcsnav/kernels.hpp"

#include <cmath>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace lcsnav::kernels {

namespace {

inline double condition(const Gene& g, std::span<const double> values) {
    const double* a = g.alpha.data();
    const std::size_t n = g.alpha.size();
    double norm = 0.0, sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        norm += std::abs(a[i]);
        sum += a[i] * values[i];
    }
    return sum / norm;
}

constexpr std::size_t kParallelThreshold = 512;

}  // namespace

void conditions_serial(std::span<const Gene> genes, std::span<const double> values,
                       std::span<double> out) {
    for (std::size_t k = 0; k < genes.size(); ++k) out[k] = condition(genes[k], values);
}

void conditions_parallel(std::span<const Gene> genes, std::span<const double> values,
                         std::span<double> out) {
    const auto count = static_cast<std::ptrdiff_t>(genes.size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t k = 0; k < count; ++k)
        out[static_cast<std::size_t>(k)] = condition(genes[static_cast<std::size_t>(k)], values);
}

void conditions(std::span<const Gene> genes, std::span<const double> values, std::span<double> out) {
    if (genes.size() >= kParallelThreshold && max_threads() > 1)
        conditions_parallel(genes, values, out);
    else
        conditions_serial(genes, values, out);
}

int max_threads() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

}  // namespace lcsnav::kernels
