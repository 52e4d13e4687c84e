#include "kpartite/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include <fmt/format.h>

#include "kpartite/error.hpp"
#include "kpartite/kernels.hpp"

namespace kpartite {

SymmetricMatrix::SymmetricMatrix(Matrix m) : m_(std::move(m)) {
  if (!m_.square()) throw InvalidArgument("SymmetricMatrix: matrix is not square");
  if (!is_symmetric(m_)) throw InvalidArgument("SymmetricMatrix: matrix is not symmetric");
}

SymmetricMatrix SymmetricMatrix::from_symmetrized(const Matrix& m) {
  return SymmetricMatrix(symmetrized(m));
}

Matrix EigenDecomposition::reconstruct() const {
  const std::size_t n = values.size();
  Matrix scaled = vectors;
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c) scaled(r, c) *= values[c];
  return scaled * vectors.transposed();
}

namespace {

struct Rotation {
  std::size_t p = 0;
  std::size_t q = 0;
  double c = 1.0;
  double s = 0.0;
  double t = 0.0;
  bool active = false;
};

Rotation make_rotation(const Matrix& a, std::size_t p, std::size_t q) {
  Rotation rot{p, q};
  const double apq = a(p, q);
  if (apq == 0.0) return rot;
  const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
  double t;
  if (std::abs(theta) > 1e150) {
    t = 0.5 / theta;
  } else {
    t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(1.0 + theta * theta));
  }
  rot.t = t;
  rot.c = 1.0 / std::sqrt(1.0 + t * t);
  rot.s = t * rot.c;
  rot.active = true;
  return rot;
}

// Entries this small next to both diagonal entries are dropped instead of rotated.
bool negligible(const Matrix& a, std::size_t p, std::size_t q) {
  const double g = 100.0 * std::abs(a(p, q));
  return std::abs(a(p, p)) + g == std::abs(a(p, p)) && std::abs(a(q, q)) + g == std::abs(a(q, q));
}

double max_off_diagonal(const Matrix& a) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = i + 1; j < a.cols(); ++j) m = std::max(m, std::abs(a(i, j)));
  return m;
}

// Classical two-sided update of one rotation on symmetric storage.
void apply_single(Matrix& a, Matrix& v, const Rotation& r) {
  const std::size_t n = a.rows();
  const double apq = a(r.p, r.q);
  a(r.p, r.p) -= r.t * apq;
  a(r.q, r.q) += r.t * apq;
  a(r.p, r.q) = 0.0;
  a(r.q, r.p) = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    if (k == r.p || k == r.q) continue;
    const double akp = a(k, r.p);
    const double akq = a(k, r.q);
    const double np = r.c * akp - r.s * akq;
    const double nq = r.s * akp + r.c * akq;
    a(k, r.p) = np;
    a(r.p, k) = np;
    a(k, r.q) = nq;
    a(r.q, k) = nq;
  }
  for (std::size_t k = 0; k < n; ++k) {
    const double vkp = v(k, r.p);
    const double vkq = v(k, r.q);
    v(k, r.p) = r.c * vkp - r.s * vkq;
    v(k, r.q) = r.s * vkp + r.c * vkq;
  }
}

int jacobi_serial(Matrix& a, Matrix& v, double threshold) {
  const std::size_t n = a.rows();
  for (int sweep = 1; sweep <= kMaxJacobiSweeps; ++sweep) {
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        if (a(p, q) == 0.0) continue;
        if (sweep > 4 && negligible(a, p, q)) {
          a(p, q) = 0.0;
          a(q, p) = 0.0;
          continue;
        }
        const Rotation r = make_rotation(a, p, q);
        if (r.active) apply_single(a, v, r);
      }
    }
    if (max_off_diagonal(a) <= threshold) return sweep;
  }
  throw NonConvergence(fmt::format("Jacobi did not converge in {} sweeps", kMaxJacobiSweeps));
}

// Round-robin (chess tournament) schedule: round r pairs up m = n rounded up to
// even players so that every pair meets exactly once per sweep.
std::vector<std::pair<std::size_t, std::size_t>> round_pairs(std::size_t m, std::size_t round) {
  std::vector<std::size_t> ring(m);
  ring[0] = 0;
  for (std::size_t i = 1; i < m; ++i) ring[i] = 1 + (i - 1 + round) % (m - 1);
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  pairs.reserve(m / 2);
  for (std::size_t i = 0; i < m / 2; ++i) {
    std::size_t p = ring[i];
    std::size_t q = ring[m - 1 - i];
    if (p > q) std::swap(p, q);
    pairs.emplace_back(p, q);
  }
  return pairs;
}

int jacobi_parallel(Matrix& a, Matrix& v, double threshold) {
  const std::size_t n = a.rows();
  const std::size_t m = n % 2 == 0 ? n : n + 1;
  const auto rows = static_cast<std::ptrdiff_t>(n);
  std::vector<Rotation> rots;
  for (int sweep = 1; sweep <= kMaxJacobiSweeps; ++sweep) {
    for (std::size_t round = 0; round + 1 < m; ++round) {
      rots.clear();
      for (auto [p, q] : round_pairs(m, round)) {
        if (q >= n || a(p, q) == 0.0) continue;  // q == n is the padding slot
        if (sweep > 4 && negligible(a, p, q)) {
          a(p, q) = 0.0;
          a(q, p) = 0.0;
          continue;
        }
        const Rotation r = make_rotation(a, p, q);
        if (r.active) rots.push_back(r);
      }
      if (rots.empty()) continue;
      const auto nrot = static_cast<std::ptrdiff_t>(rots.size());

      // A <- A J and V <- V J; rows are independent.
#pragma omp parallel for schedule(static)
      for (std::ptrdiff_t k = 0; k < rows; ++k) {
        auto arow = a.row(static_cast<std::size_t>(k));
        auto vrow = v.row(static_cast<std::size_t>(k));
        for (const Rotation& r : rots) {
          const double ap = arow[r.p], aq = arow[r.q];
          arow[r.p] = r.c * ap - r.s * aq;
          arow[r.q] = r.s * ap + r.c * aq;
          const double vp = vrow[r.p], vq = vrow[r.q];
          vrow[r.p] = r.c * vp - r.s * vq;
          vrow[r.q] = r.s * vp + r.c * vq;
        }
      }
      // A <- J^T A; each rotation owns its two rows.
#pragma omp parallel for schedule(static)
      for (std::ptrdiff_t i = 0; i < nrot; ++i) {
        const Rotation& r = rots[static_cast<std::size_t>(i)];
        auto rp = a.row(r.p);
        auto rq = a.row(r.q);
        for (std::size_t k = 0; k < n; ++k) {
          const double ap = rp[k], aq = rq[k];
          rp[k] = r.c * ap - r.s * aq;
          rq[k] = r.s * ap + r.c * aq;
        }
        rp[r.q] = 0.0;
        rq[r.p] = 0.0;
      }
      // Restore exact symmetry from the upper triangle.
#pragma omp parallel for schedule(static)
      for (std::ptrdiff_t i = 0; i < rows; ++i)
        for (std::size_t j = static_cast<std::size_t>(i) + 1; j < n; ++j)
          a(j, static_cast<std::size_t>(i)) = a(static_cast<std::size_t>(i), j);
    }
    if (max_off_diagonal(a) <= threshold) return sweep;
  }
  throw NonConvergence(fmt::format("Jacobi did not converge in {} sweeps", kMaxJacobiSweeps));
}

}  // namespace

EigenDecomposition sym_eigen(const SymmetricMatrix& s, double tol, EigenBackend backend) {
  const std::size_t n = s.size();
  for (double x : s.matrix().data())
    if (!std::isfinite(x)) throw InvalidArgument("sym_eigen: non-finite entry");

  Matrix a = s.matrix();
  Matrix v = Matrix::identity(n);
  const double threshold = tol * s.frobenius_norm();
  int sweeps = 0;
  if (n > 1 && max_off_diagonal(a) > threshold) {
    const bool parallel = backend == EigenBackend::Parallel ||
                          (backend == EigenBackend::Auto && n >= kernels::kParallelThreshold);
    sweeps = parallel ? jacobi_parallel(a, v, threshold) : jacobi_serial(a, v, threshold);
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return a(i, i) < a(j, j); });
  EigenDecomposition out;
  out.values.resize(n);
  out.vectors = Matrix(n, n);
  out.sweeps = sweeps;
  for (std::size_t c = 0; c < n; ++c) {
    out.values[c] = a(order[c], order[c]);
    for (std::size_t r = 0; r < n; ++r) out.vectors(r, c) = v(r, order[c]);
  }
  return out;
}

double min_eigenvalue(const SymmetricMatrix& s) {
  if (s.size() == 0) throw InvalidArgument("min_eigenvalue of empty matrix");
  return sym_eigen(s).values.front();
}

bool is_positive_definite(const SymmetricMatrix& s) {
  if (s.size() == 0) return true;
  const double norm = s.frobenius_norm();
  return norm > 0.0 && min_eigenvalue(s) > kPdRelTol * norm;
}

bool is_positive_semidefinite(const SymmetricMatrix& s) {
  if (s.size() == 0) return true;
  return min_eigenvalue(s) > -kPsdRelTol * s.frobenius_norm();
}

Inertia inertia(const SymmetricMatrix& s, double rel_tol) {
  Inertia in;
  if (s.size() == 0) return in;
  const double cut = rel_tol * s.frobenius_norm();
  for (double l : sym_eigen(s).values) {
    if (l > cut)
      ++in.positive;
    else if (l < -cut)
      ++in.negative;
    else
      ++in.zero;
  }
  return in;
}

std::optional<Matrix> cholesky(const Matrix& a) {
  if (!a.square()) throw InvalidArgument("cholesky: matrix not square");
  const std::size_t n = a.rows();
  Matrix l(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    double d = a(j, j);
    for (std::size_t k = 0; k < j; ++k) d -= l(j, k) * l(j, k);
    if (!(d > 0.0)) return std::nullopt;
    const double ljj = std::sqrt(d);
    l(j, j) = ljj;
    for (std::size_t i = j + 1; i < n; ++i) {
      double s = a(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
      l(i, j) = s / ljj;
    }
  }
  return l;
}

Vector cholesky_solve(const Matrix& lower, std::span<const double> rhs) {
  const std::size_t n = lower.rows();
  if (rhs.size() != n) throw InvalidArgument("cholesky_solve: length mismatch");
  Vector y(rhs.begin(), rhs.end());
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < i; ++k) y[i] -= lower(i, k) * y[k];
    y[i] /= lower(i, i);
  }
  for (std::size_t i = n; i-- > 0;) {
    for (std::size_t k = i + 1; k < n; ++k) y[i] -= lower(k, i) * y[k];
    y[i] /= lower(i, i);
  }
  return y;
}

Matrix cholesky_solve(const Matrix& lower, const Matrix& rhs) {
  if (rhs.rows() != lower.rows()) throw InvalidArgument("cholesky_solve: shape mismatch");
  Matrix x(rhs.rows(), rhs.cols());
  for (std::size_t c = 0; c < rhs.cols(); ++c) {
    const Vector col = cholesky_solve(lower, rhs.column(c));
    for (std::size_t r = 0; r < rhs.rows(); ++r) x(r, c) = col[r];
  }
  return x;
}

Matrix solve_symmetric(const SymmetricMatrix& a, const Matrix& rhs) {
  if (rhs.rows() != a.size()) throw InvalidArgument("solve_symmetric: shape mismatch");
  if (is_positive_definite(a)) {
    if (auto l = cholesky(a.matrix())) return cholesky_solve(*l, rhs);
  }
  const EigenDecomposition eig = sym_eigen(a);
  const double cut = kPdRelTol * a.frobenius_norm();
  const Matrix vt_b = eig.vectors.transposed() * rhs;
  Matrix scaled(vt_b.rows(), vt_b.cols());
  for (std::size_t i = 0; i < eig.values.size(); ++i) {
    if (std::abs(eig.values[i]) <= cut) continue;
    for (std::size_t c = 0; c < rhs.cols(); ++c) scaled(i, c) = vt_b(i, c) / eig.values[i];
  }
  return eig.vectors * scaled;
}

Matrix inverse_spd(const SymmetricMatrix& a) {
  if (!is_positive_definite(a)) throw NotPositiveDefinite("inverse_spd: matrix is not PD");
  auto l = cholesky(a.matrix());
  if (!l) throw NotPositiveDefinite("inverse_spd: Cholesky breakdown");
  return symmetrized(cholesky_solve(*l, Matrix::identity(a.size())));
}

bool is_metzler(const Matrix& a) {
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j)
      if (i != j && a(i, j) < 0.0) return false;
  return true;
}

bool is_irreducible(const Matrix& a, double threshold) {
  if (!a.square()) throw InvalidArgument("is_irreducible: matrix not square");
  const std::size_t n = a.rows();
  if (n <= 1) return true;
  auto reaches_all = [&](bool transpose) {
    std::vector<char> seen(n, 0);
    std::vector<std::size_t> stack{0};
    seen[0] = 1;
    std::size_t count = 1;
    while (!stack.empty()) {
      const std::size_t i = stack.back();
      stack.pop_back();
      for (std::size_t j = 0; j < n; ++j) {
        const double w = transpose ? a(j, i) : a(i, j);
        if (j != i && !seen[j] && std::abs(w) > threshold) {
          seen[j] = 1;
          ++count;
          stack.push_back(j);
        }
      }
    }
    return count == n;
  };
  return reaches_all(false) && reaches_all(true);
}

SchurSplit schur_split(const SymmetricMatrix& m, std::size_t block_size) {
  const std::size_t n = m.size();
  if (block_size == 0 || block_size > n) throw InvalidArgument("schur_split: bad block size");
  const std::size_t rest = n - block_size;
  SymmetricMatrix r(m.matrix().block(0, 0, block_size, block_size));
  if (!is_positive_definite(r)) throw NotPositiveDefinite("schur_split: leading block not PD");
  auto l = cholesky(r.matrix());
  if (!l) throw NotPositiveDefinite("schur_split: Cholesky breakdown on leading block");
  const Matrix s = m.matrix().block(0, block_size, block_size, rest);
  const Matrix q = m.matrix().block(block_size, block_size, rest, rest);
  const Matrix rinv_s = cholesky_solve(*l, s);
  Matrix h = q - s.transposed() * rinv_s;
  return {std::move(r), SymmetricMatrix::from_symmetrized(h)};
}

MetzlerCertificate metzler_pd_certificate(std::span<const double> diag, const SymmetricMatrix& a) {
  const std::size_t n = a.size();
  if (diag.size() != n) throw InvalidArgument("metzler_pd_certificate: length mismatch");
  if (!is_metzler(a.matrix())) throw NotMetzler("metzler_pd_certificate: A has a negative off-diagonal entry");

  Matrix dma = a.matrix() * -1.0;
  for (std::size_t i = 0; i < n; ++i) dma(i, i) += diag[i];
  const SymmetricMatrix s(std::move(dma));

  MetzlerCertificate cert;
  if (n == 0) {
    cert.positive_definite = true;
    cert.z = Vector{};
    return cert;
  }
  cert.min_eigenvalue = min_eigenvalue(s);
  const double norm = s.frobenius_norm();
  cert.positive_definite = norm > 0.0 && cert.min_eigenvalue > kPdRelTol * norm;
  if (!cert.positive_definite) return cert;

  auto l = cholesky(s.matrix());
  if (!l) throw NumericalError("metzler_pd_certificate: Cholesky breakdown on a PD matrix");
  Vector z = cholesky_solve(*l, Vector(n, 1.0));
  const Vector residual = s.matrix() * std::span<const double>(z);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(z[i] > 0.0)) throw NumericalError("metzler_pd_certificate: certificate not strictly positive");
    if (std::abs(residual[i] - 1.0) > 1e-6) throw NumericalError("metzler_pd_certificate: inaccurate solve");
  }
  const Matrix inv = cholesky_solve(*l, Matrix::identity(n));
  const double floor = -1e-10 * std::max(1.0, inv.max_abs());
  for (double x : inv.data())
    if (x < floor) throw NumericalError("metzler_pd_certificate: inverse has a negative entry");
  cert.z = std::move(z);
  return cert;
}

MarginBound lemma4_margin(const SymmetricMatrix& a, const Matrix& b, const Matrix& c, double eps) {
  if (!(eps > 0.0)) throw InvalidArgument("lemma4_margin: eps must be positive");
  const std::size_t n = a.size();
  if (n == 0) throw InvalidArgument("lemma4_margin: empty matrix");
  if (b.rows() != n || c.cols() != n) throw InvalidArgument("lemma4_margin: shape mismatch");
  if (!is_metzler(a.matrix())) throw NotMetzler("lemma4_margin: A is not Metzler");

  // Laplacian of the off-diagonal part.
  Matrix lap(n, n);
  Vector offsum(n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j) {
        lap(i, j) = -a(i, j);
        offsum[i] += a(i, j);
      }
  for (std::size_t i = 0; i < n; ++i) lap(i, i) = offsum[i];

  const EigenDecomposition eig = sym_eigen(SymmetricMatrix::from_symmetrized(lap));
  const Matrix ct = c * eig.vectors;
  const Matrix tb = eig.vectors.transposed() * b;
  double psi = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double cmax = 0.0, bmax = 0.0;
    for (std::size_t h = 0; h < ct.rows(); ++h) cmax = std::max(cmax, std::abs(ct(h, i)));
    for (std::size_t k = 0; k < tb.cols(); ++k) bmax = std::max(bmax, std::abs(tb(i, k)));
    psi = std::max(psi, cmax * bmax);
  }

  MarginBound out;
  out.psi = psi;
  out.delta = std::max(10.0 * static_cast<double>(n) * psi / eps, 1.0);
  out.diagonal.resize(n);
  for (std::size_t i = 0; i < n; ++i) out.diagonal[i] = out.delta + offsum[i] + a(i, i);
  return out;
}

}  // namespace kpartite
