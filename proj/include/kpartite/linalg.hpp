#pragma once

#include <cstddef>
#include <optional>
#include <span>

#include "kpartite/matrix.hpp"

namespace kpartite {

/// Square matrix that is exactly symmetric. Construction rejects anything else.
class SymmetricMatrix {
 public:
  SymmetricMatrix() = default;
  explicit SymmetricMatrix(Matrix m);

  /// Averages `m` with its transpose first; for products symmetric only up to rounding.
  static SymmetricMatrix from_symmetrized(const Matrix& m);

  std::size_t size() const noexcept { return m_.rows(); }
  const Matrix& matrix() const noexcept { return m_; }
  double operator()(std::size_t i, std::size_t j) const { return m_(i, j); }
  double frobenius_norm() const { return m_.frobenius_norm(); }

 private:
  Matrix m_;
};

struct EigenDecomposition {
  Vector values;   // ascending
  Matrix vectors;  // orthonormal columns, vectors.column(i) pairs with values[i]
  int sweeps = 0;

  Vector vector(std::size_t i) const { return vectors.column(i); }
  Matrix reconstruct() const;
};

enum class EigenBackend {
  Auto,      // parallel ordering for n >= kernels::kParallelThreshold
  Serial,    // classical cyclic-by-row Jacobi
  Parallel,  // round-robin ordering, disjoint rotations applied with OpenMP
};

inline constexpr double kEigenTol = 1e-14;
inline constexpr int kMaxJacobiSweeps = 100;

/// PD verdict: min eigenvalue > kPdRelTol * ||S||_F.
inline constexpr double kPdRelTol = 1e-10;
/// PSD verdict: min eigenvalue > -kPsdRelTol * ||S||_F.
inline constexpr double kPsdRelTol = 1e-9;

/// Jacobi eigensolver. Rotates until the largest off-diagonal magnitude is at most
/// tol * ||S||_F; throws NonConvergence after kMaxJacobiSweeps sweeps.
EigenDecomposition sym_eigen(const SymmetricMatrix& s, double tol = kEigenTol,
                             EigenBackend backend = EigenBackend::Auto);

double min_eigenvalue(const SymmetricMatrix& s);
bool is_positive_definite(const SymmetricMatrix& s);
bool is_positive_semidefinite(const SymmetricMatrix& s);

struct Inertia {
  std::size_t positive = 0;
  std::size_t negative = 0;
  std::size_t zero = 0;
  friend bool operator==(const Inertia&, const Inertia&) = default;
};

/// Eigenvalues with |lambda| <= rel_tol * ||S||_F count as zero.
Inertia inertia(const SymmetricMatrix& s, double rel_tol = 1e-9);

/// Lower Cholesky factor, or nullopt when a pivot is not strictly positive.
std::optional<Matrix> cholesky(const Matrix& a);
Matrix cholesky_solve(const Matrix& lower, const Matrix& rhs);
Vector cholesky_solve(const Matrix& lower, std::span<const double> rhs);

/// Cholesky when `a` is PD, otherwise the minimum-norm solution through the
/// eigendecomposition (eigenvalues below kPdRelTol * ||a||_F are dropped).
Matrix solve_symmetric(const SymmetricMatrix& a, const Matrix& rhs);

/// Inverse of a PD matrix; throws NotPositiveDefinite.
Matrix inverse_spd(const SymmetricMatrix& a);

bool is_metzler(const Matrix& a);

/// Strong connectivity of the off-diagonal pattern |a_ij| > threshold. 0x0 and
/// 1x1 matrices count as irreducible.
bool is_irreducible(const Matrix& a, double threshold = 1e-12);

struct SchurSplit {
  SymmetricMatrix leading;     // R, the leading block_size x block_size block
  SymmetricMatrix complement;  // H = Q - S^T R^{-1} S
};

/// Splits M = [R S; S^T Q]; throws NotPositiveDefinite when R is not PD.
SchurSplit schur_split(const SymmetricMatrix& m, std::size_t block_size);

struct MetzlerCertificate {
  bool positive_definite = false;
  double min_eigenvalue = 0.0;
  /// z = (D - A)^{-1} 1, present iff positive_definite; strictly positive.
  std::optional<Vector> z;
};

/// Decides whether D - A is positive definite for diagonal D and symmetric
/// Metzler A, and returns the positive certificate vector when it is.
MetzlerCertificate metzler_pd_certificate(std::span<const double> diag, const SymmetricMatrix& a);

struct MarginBound {
  double delta = 0.0;  // the scalar shift Delta = delta * I
  double psi = 0.0;
  Vector diagonal;     // D = Delta + Lbar + A (a diagonal matrix)
};

/// Picks D so that (D - A) 1 = delta 1 and every entry of C (D - A)^{-1} B is
/// below eps in magnitude. psi is the largest entry of c_i b_i^T over all n
/// modes of the Laplacian of A's off-diagonal part, including its null modes;
/// delta = max(10 * n * psi / eps, 1).
MarginBound lemma4_margin(const SymmetricMatrix& a, const Matrix& b, const Matrix& c, double eps);

}  // namespace kpartite
