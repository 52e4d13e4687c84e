#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "kpartite/assumptions.hpp"
#include "kpartite/graph.hpp"
#include "kpartite/linalg.hpp"

namespace kpartite {

/// Zero-eigenvalue tolerance, relative to ||M||_F. Used for the PSD verdict,
/// the multiplicity count and the block-constant test alike.
inline constexpr double kKernelTol = 1e-8;

/// M = diag(delta_1 I, ..., delta_k I) - A.
SymmetricMatrix build_M(const SignedClusteredGraph& g, std::span<const double> deltas);

struct KernelReport {
  bool is_psd = false;
  double min_eigenvalue = 0.0;
  std::size_t zero_multiplicity = 0;
  std::vector<Vector> kernel_basis;  // orthonormal, sign-normalized
  bool block_constant = false;
  double max_block_deviation = 0.0;
  std::vector<Vector> alphas;  // per basis vector, unit norm; empty unless block_constant

  /// Both conditions for k-partite consensus: singular PSD with a block-constant kernel.
  bool consensus() const noexcept { return is_psd && zero_multiplicity > 0 && block_constant; }
};

KernelReport verify_lemma1(const SymmetricMatrix& m, const ClusterPartition& partition,
                           double tol = kKernelTol);

struct ReducedSystem {
  Matrix matrix;  // D - C, k x k, not symmetric in general
  double smallest_singular_value = 0.0;
  std::optional<Vector> null_vector;  // unit, sign-normalized; present iff singular
};

/// Singular when the smallest singular value is <= tol * ||D - C||_F.
ReducedSystem reduced_system(const TrustMatrix& c, std::span<const double> deltas,
                             double tol = kKernelTol);

/// Orthogonal projection of x0 onto ker M. Throws NotPositiveSemidefinite.
Vector predict_steady_state(const SymmetricMatrix& m, std::span<const double> x0,
                            double tol = kKernelTol);

/// [alpha_1 1_{n_1}; ...; alpha_k 1_{n_k}]
Vector lift(const ClusterPartition& partition, std::span<const double> alpha);

/// Per-cluster means of x.
Vector cluster_means(const ClusterPartition& partition, std::span<const double> x);

/// Unit Euclidean norm, first entry above 1e-12 * ||v|| made positive.
Vector sign_normalized(Vector v);

}  // namespace kpartite
