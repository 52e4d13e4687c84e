#include "kpartite/verification.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "kpartite/error.hpp"

namespace kpartite {

SymmetricMatrix build_M(const SignedClusteredGraph& g, std::span<const double> deltas) {
  const auto& part = g.partition();
  if (deltas.size() != part.clusters())
    throw InvalidArgument(fmt::format("build_M: {} gains for {} clusters", deltas.size(), part.clusters()));
  Matrix m = g.adjacency() * -1.0;
  for (std::size_t c = 0; c < part.clusters(); ++c)
    for (std::size_t t = 0; t < part.size(c); ++t) {
      const std::size_t i = part.offset(c) + t;
      m(i, i) += deltas[c];
    }
  // -A is exactly symmetric when A is; from_symmetrized also tolerates unvalidated input.
  return SymmetricMatrix::from_symmetrized(m);
}

Vector sign_normalized(Vector v) {
  const double n = norm2(v);
  if (n == 0.0) return v;
  for (double& x : v) x /= n;
  for (double x : v) {
    if (std::abs(x) > 1e-12) {
      if (x < 0.0)
        for (double& y : v) y = -y;
      break;
    }
  }
  return v;
}

Vector cluster_means(const ClusterPartition& partition, std::span<const double> x) {
  if (x.size() != partition.agents()) throw InvalidArgument("cluster_means: length mismatch");
  Vector means(partition.clusters(), 0.0);
  for (std::size_t c = 0; c < partition.clusters(); ++c) {
    for (std::size_t t = 0; t < partition.size(c); ++t) means[c] += x[partition.offset(c) + t];
    means[c] /= static_cast<double>(partition.size(c));
  }
  return means;
}

Vector lift(const ClusterPartition& partition, std::span<const double> alpha) {
  if (alpha.size() != partition.clusters()) throw InvalidArgument("lift: length mismatch");
  Vector z(partition.agents());
  for (std::size_t c = 0; c < partition.clusters(); ++c)
    for (std::size_t t = 0; t < partition.size(c); ++t) z[partition.offset(c) + t] = alpha[c];
  return z;
}

KernelReport verify_lemma1(const SymmetricMatrix& m, const ClusterPartition& partition, double tol) {
  if (m.size() != partition.agents())
    throw InvalidArgument(fmt::format("verify_lemma1: M is {}x{} but partition has {} agents",
                                      m.size(), m.size(), partition.agents()));
  KernelReport r;
  if (m.size() == 0) return r;
  const EigenDecomposition eig = sym_eigen(m);
  const double cut = tol * m.frobenius_norm();
  r.min_eigenvalue = eig.values.front();
  r.is_psd = r.min_eigenvalue >= -cut;
  for (std::size_t i = 0; i < eig.values.size(); ++i)
    if (std::abs(eig.values[i]) <= cut) r.kernel_basis.push_back(sign_normalized(eig.vector(i)));
  r.zero_multiplicity = r.kernel_basis.size();

  r.block_constant = r.zero_multiplicity > 0;
  for (const Vector& v : r.kernel_basis) {
    const Vector means = cluster_means(partition, v);
    for (std::size_t c = 0; c < partition.clusters(); ++c)
      for (std::size_t t = 0; t < partition.size(c); ++t)
        r.max_block_deviation =
            std::max(r.max_block_deviation, std::abs(v[partition.offset(c) + t] - means[c]));
  }
  // Basis vectors have unit norm, so the deviation bound is tol itself.
  if (r.max_block_deviation > tol) r.block_constant = false;
  if (r.block_constant)
    for (const Vector& v : r.kernel_basis) r.alphas.push_back(sign_normalized(cluster_means(partition, v)));
  return r;
}

ReducedSystem reduced_system(const TrustMatrix& c, std::span<const double> deltas, double tol) {
  const std::size_t k = c.clusters();
  if (deltas.size() != k) throw InvalidArgument("reduced_system: length mismatch");
  ReducedSystem out;
  out.matrix = c.c * -1.0;
  for (std::size_t i = 0; i < k; ++i) out.matrix(i, i) += deltas[i];
  if (k == 0) return out;

  // Singular values of B are the nonnegative eigenvalues of [0 B; B^T 0]; this
  // avoids squaring the condition number as B^T B would.
  Matrix aug(2 * k, 2 * k);
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j) {
      aug(i, k + j) = out.matrix(i, j);
      aug(k + j, i) = out.matrix(i, j);
    }
  const EigenDecomposition aug_eig = sym_eigen(SymmetricMatrix(std::move(aug)));
  double smin = INFINITY;
  for (double l : aug_eig.values) smin = std::min(smin, std::abs(l));
  out.smallest_singular_value = smin;

  if (smin <= tol * out.matrix.frobenius_norm()) {
    const EigenDecomposition gram =
        sym_eigen(SymmetricMatrix::from_symmetrized(out.matrix.transposed() * out.matrix));
    out.null_vector = sign_normalized(gram.vector(0));
  }
  return out;
}

Vector predict_steady_state(const SymmetricMatrix& m, std::span<const double> x0, double tol) {
  if (x0.size() != m.size()) throw InvalidArgument("predict_steady_state: length mismatch");
  const EigenDecomposition eig = sym_eigen(m);
  const double cut = tol * m.frobenius_norm();
  if (!eig.values.empty() && eig.values.front() < -cut)
    throw NotPositiveSemidefinite(fmt::format(
        "predict_steady_state: M has eigenvalue {:.6g}, steady state undefined", eig.values.front()));
  Vector x(m.size(), 0.0);
  for (std::size_t i = 0; i < eig.values.size(); ++i) {
    if (std::abs(eig.values[i]) > cut) continue;
    const Vector v = eig.vector(i);
    const double b = dot(v, x0);
    for (std::size_t j = 0; j < x.size(); ++j) x[j] += b * v[j];
  }
  return x;
}

}  // namespace kpartite
