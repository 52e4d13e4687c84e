// Serial reference vs OpenMP kernels. Usage: bench_kernels [n] [repeats]
#include <chrono>
#include <cstdlib>
#include <random>

#include <fmt/format.h>

#include "kpartite/kernels.hpp"
#include "kpartite/linalg.hpp"

using namespace kpartite;

namespace {

Matrix random_symmetric(std::size_t n, std::mt19937_64& gen) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Matrix a(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) a(i, j) = a(j, i) = u(gen);
  return a;
}

template <class F>
double best_ms(int repeats, F&& f) {
  double best = 1e300;
  for (int r = 0; r < repeats; ++r) {
    const auto t0 = std::chrono::steady_clock::now();
    f();
    const auto t1 = std::chrono::steady_clock::now();
    best = std::min(best, std::chrono::duration<double, std::milli>(t1 - t0).count());
  }
  return best;
}

void row(const char* name, double serial, double parallel) {
  fmt::print("{:<22} {:>12.3f} {:>12.3f} {:>8.2f}x\n", name, serial, parallel, serial / parallel);
}

}  // namespace

int main(int argc, char** argv) {
  const std::size_t n = argc > 1 ? std::strtoul(argv[1], nullptr, 10) : 256;
  const int repeats = argc > 2 ? std::atoi(argv[2]) : 3;
  std::mt19937_64 gen(1);
  const Matrix a = random_symmetric(n, gen);
  const Matrix b = random_symmetric(n, gen);
  Vector x(n, 1.0), y(n);
  Matrix c(n, n);

  fmt::print("n = {}, threads = {}, best of {}\n", n, kernels::max_threads(), repeats);
  fmt::print("{:<22} {:>12} {:>12} {:>9}\n", "kernel", "serial ms", "omp ms", "speedup");
  row("gemv", best_ms(repeats, [&] { kernels::serial::gemv(a, x, y); }),
      best_ms(repeats, [&] { kernels::omp::gemv(a, x, y); }));
  row("gemm", best_ms(repeats, [&] { kernels::serial::gemm(a, b, c); }),
      best_ms(repeats, [&] { kernels::omp::gemm(a, b, c); }));

  const SymmetricMatrix s(a);
  row("jacobi eigen", best_ms(repeats, [&] { sym_eigen(s, kEigenTol, EigenBackend::Serial); }),
      best_ms(repeats, [&] { sym_eigen(s, kEigenTol, EigenBackend::Parallel); }));

  const EigenDecomposition eig = sym_eigen(s);
  Vector times(200);
  for (std::size_t m = 0; m < times.size(); ++m) times[m] = 0.01 * static_cast<double>(m);
  std::vector<Vector> states(times.size(), Vector(n));
  row("spectral propagate",
      best_ms(repeats, [&] { kernels::serial::spectral_propagate(eig.vectors, eig.values, x, times, states); }),
      best_ms(repeats, [&] { kernels::omp::spectral_propagate(eig.vectors, eig.values, x, times, states); }));
  return 0;
}
