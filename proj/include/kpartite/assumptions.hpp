#pragma once

#include <cstddef>
#include <vector>

#include "kpartite/graph.hpp"
#include "kpartite/matrix.hpp"

namespace kpartite {

/// k x k homogeneity constants: c(i,j) is the common row sum of block A_{i,j}.
/// Not symmetric in general.
struct TrustMatrix {
  Matrix c;

  std::size_t clusters() const noexcept { return c.rows(); }
  double operator()(std::size_t i, std::size_t j) const { return c(i, j); }
};

inline constexpr double kHomogeneityTol = 1e-9;

/// Row sums of every block must agree within tol * max|c_ij|. Throws
/// HomogeneityViolation for the first block (row-major order) that does not.
TrustMatrix homogeneity_certificate(const SignedClusteredGraph& g, double tol = kHomogeneityTol);

/// Connected components of a cluster over positive intra-cluster edges. Agent
/// indices are global; components are ordered by their smallest member.
std::vector<std::vector<std::size_t>> familiarity_components(const SignedClusteredGraph& g,
                                                             std::size_t cluster);

/// Close-friendship test of every cluster against `hub`. Entry h is true when
/// cluster h is a singleton, or every pair in it is either directly friendly or
/// has enemies in one familiarity component of the hub. The hub's own entry is true.
std::vector<bool> close_friendship_check(const SignedClusteredGraph& g, std::size_t hub);

/// A_{h,h} + A_{h,hub} (delta_hub I - A_{hub,hub})^{-1} A_{hub,h}.
Matrix close_friendship_matrix(const SignedClusteredGraph& g, std::size_t hub, std::size_t h,
                               double delta_hub);

/// Off-diagonal entries of close_friendship_matrix all above 1e-12. Throws
/// NotPositiveDefinite when delta_hub I - A_{hub,hub} is not PD.
bool verify_ass3_matrix_form(const SignedClusteredGraph& g, std::size_t hub, std::size_t h,
                             double delta_hub);

struct ClusterOrdering {
  std::size_t hub = 0;
  std::size_t exempt = 1;
  /// order[position] = original cluster index; hub first, exempt second.
  std::vector<std::size_t> order;
  /// agent_permutation[new agent index] = original agent index.
  std::vector<std::size_t> agent_permutation;

  friend bool operator==(const ClusterOrdering&, const ClusterOrdering&) = default;
};

/// Builds the ordering (and its agent permutation) for an explicit cluster order.
ClusterOrdering make_ordering(const ClusterPartition& partition, std::vector<std::size_t> order);

/// Lowest hub index for which at most one other cluster fails the close-friendship
/// test. The failing cluster, or else the lowest non-hub index, is placed second.
/// Throws Assumption3Violation listing the failures of every hub candidate.
ClusterOrdering find_ordering(const SignedClusteredGraph& g);

struct RelabeledGraph {
  SignedClusteredGraph graph;
  std::vector<std::size_t> agent_permutation;
};

/// Permutes clusters (and agents) into ordering.order.
RelabeledGraph relabel(const SignedClusteredGraph& g, const ClusterOrdering& ordering);

/// c'(a,b) = c(order[a], order[b]).
TrustMatrix permute(const TrustMatrix& c, const std::vector<std::size_t>& order);

}  // namespace kpartite
