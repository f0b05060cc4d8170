#pragma once

#include <span>

#include "lcsnav/lcs.hpp"

// Batch condition evaluation over a gene population. The serial loop is the
// reference; the OpenMP version must match it bit for bit (each output is an
// independent fixed-order reduction).
namespace lcsnav::kernels {

void conditions_serial(std::span<const Gene> genes, std::span<const double> values,
                       std::span<double> out);
void conditions_parallel(std::span<const Gene> genes, std::span<const double> values,
                         std::span<double> out);
// Picks the parallel path only for populations large enough to pay for it.
void conditions(std::span<const Gene> genes, std::span<const double> values,
                std::span<double> out);

int max_threads();

}  // namespace lcsnav::kernels
