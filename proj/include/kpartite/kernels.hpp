#pragma once

// Data-parallel kernels. Each operation exists as a serial reference and an
// OpenMP variant; the dispatching entry points pick one by problem size.
// The serial versions are what the tests compare against.

#include <cstddef>
#include <span>

#include "kpartite/matrix.hpp"

namespace kpartite::kernels {

/// Below this dimension the dispatchers stay serial.
inline constexpr std::size_t kParallelThreshold = 64;

namespace serial {
void gemv(const Matrix& a, std::span<const double> x, std::span<double> y);
void gemm(const Matrix& a, const Matrix& b, Matrix& c);
/// states[m] = V * (exp(-lambda * times[m]) .* coeffs)
void spectral_propagate(const Matrix& vectors, std::span<const double> values,
                        std::span<const double> coeffs, std::span<const double> times,
                        std::span<Vector> states);
}  // namespace serial

namespace omp {
void gemv(const Matrix& a, std::span<const double> x, std::span<double> y);
void gemm(const Matrix& a, const Matrix& b, Matrix& c);
void spectral_propagate(const Matrix& vectors, std::span<const double> values,
                        std::span<const double> coeffs, std::span<const double> times,
                        std::span<Vector> states);
}  // namespace omp

void gemv(const Matrix& a, std::span<const double> x, std::span<double> y);
Matrix gemm(const Matrix& a, const Matrix& b);
void spectral_propagate(const Matrix& vectors, std::span<const double> values,
                        std::span<const double> coeffs, std::span<const double> times,
                        std::span<Vector> states);

int max_threads();

}  // namespace kpartite::kernels
