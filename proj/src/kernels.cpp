#include "kpartite/kernels.hpp"

#include <cmath>

#include <omp.h>

#include "kpartite/error.hpp"

namespace kpartite::kernels {

namespace {

void check_gemv(const Matrix& a, std::span<const double> x, std::span<double> y) {
  if (a.cols() != x.size() || a.rows() != y.size())
    throw InvalidArgument("gemv: shape mismatch");
}

void check_gemm(const Matrix& a, const Matrix& b, const Matrix& c) {
  if (a.cols() != b.rows() || c.rows() != a.rows() || c.cols() != b.cols())
    throw InvalidArgument("gemm: shape mismatch");
}

void check_propagate(const Matrix& v, std::span<const double> values,
                     std::span<const double> coeffs, std::span<const double> times,
                     std::span<Vector> states) {
  if (!v.square() || values.size() != v.rows() || coeffs.size() != v.rows() ||
      times.size() != states.size())
    throw InvalidArgument("spectral_propagate: shape mismatch");
}

// One output row; shared by both variants so their results are bitwise equal.
inline double row_dot(const Matrix& a, std::size_t r, std::span<const double> x) {
  const auto row = a.row(r);
  double s = 0.0;
  for (std::size_t c = 0; c < row.size(); ++c) s += row[c] * x[c];
  return s;
}

inline void gemm_row(const Matrix& a, const Matrix& b, Matrix& c, std::size_t i) {
  auto out = c.row(i);
  for (double& v : out) v = 0.0;
  for (std::size_t k = 0; k < a.cols(); ++k) {
    const double aik = a(i, k);
    if (aik == 0.0) continue;
    const auto brow = b.row(k);
    for (std::size_t j = 0; j < out.size(); ++j) out[j] += aik * brow[j];
  }
}

inline void propagate_one(const Matrix& v, std::span<const double> values,
                          std::span<const double> coeffs, double t, Vector& out) {
  const std::size_t n = v.rows();
  Vector scaled(n);
  for (std::size_t i = 0; i < n; ++i) scaled[i] = std::exp(-values[i] * t) * coeffs[i];
  out.assign(n, 0.0);
  for (std::size_t r = 0; r < n; ++r) out[r] = row_dot(v, r, scaled);
}

}  // namespace

namespace serial {

void gemv(const Matrix& a, std::span<const double> x, std::span<double> y) {
  check_gemv(a, x, y);
  for (std::size_t r = 0; r < a.rows(); ++r) y[r] = row_dot(a, r, x);
}

void gemm(const Matrix& a, const Matrix& b, Matrix& c) {
  check_gemm(a, b, c);
  for (std::size_t i = 0; i < a.rows(); ++i) gemm_row(a, b, c, i);
}

void spectral_propagate(const Matrix& vectors, std::span<const double> values,
                        std::span<const double> coeffs, std::span<const double> times,
                        std::span<Vector> states) {
  check_propagate(vectors, values, coeffs, times, states);
  for (std::size_t m = 0; m < times.size(); ++m)
    propagate_one(vectors, values, coeffs, times[m], states[m]);
}

}  // namespace serial

namespace omp {

void gemv(const Matrix& a, std::span<const double> x, std::span<double> y) {
  check_gemv(a, x, y);
  const auto rows = static_cast<std::ptrdiff_t>(a.rows());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t r = 0; r < rows; ++r) y[r] = row_dot(a, static_cast<std::size_t>(r), x);
}

void gemm(const Matrix& a, const Matrix& b, Matrix& c) {
  check_gemm(a, b, c);
  const auto rows = static_cast<std::ptrdiff_t>(a.rows());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < rows; ++i) gemm_row(a, b, c, static_cast<std::size_t>(i));
}

void spectral_propagate(const Matrix& vectors, std::span<const double> values,
                        std::span<const double> coeffs, std::span<const double> times,
                        std::span<Vector> states) {
  check_propagate(vectors, values, coeffs, times, states);
  const auto count = static_cast<std::ptrdiff_t>(times.size());
#pragma omp parallel for schedule(dynamic, 4)
  for (std::ptrdiff_t m = 0; m < count; ++m)
    propagate_one(vectors, values, coeffs, times[m], states[m]);
}

}  // namespace omp

void gemv(const Matrix& a, std::span<const double> x, std::span<double> y) {
  if (a.rows() >= kParallelThreshold)
    omp::gemv(a, x, y);
  else
    serial::gemv(a, x, y);
}

Matrix gemm(const Matrix& a, const Matrix& b) {
  Matrix c(a.rows(), b.cols());
  if (a.rows() >= kParallelThreshold)
    omp::gemm(a, b, c);
  else
    serial::gemm(a, b, c);
  return c;
}

void spectral_propagate(const Matrix& vectors, std::span<const double> values,
                        std::span<const double> coeffs, std::span<const double> times,
                        std::span<Vector> states) {
  if (vectors.rows() * times.size() >= kParallelThreshold * kParallelThreshold)
    omp::spectral_propagate(vectors, values, coeffs, times, states);
  else
    serial::spectral_propagate(vectors, values, coeffs, times, states);
}

int max_threads() { return omp_get_max_threads(); }

}  // namespace kpartite::kernels
