#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "kpartite/assumptions.hpp"
#include "kpartite/graph.hpp"
#include "kpartite/matrix.hpp"

namespace kpartite {

/// Staged values of the reduced k x k elimination. stages[h] holds m^{(h)}
/// (stages[0] = C); only entries (i,j) with i,j >= h are meaningful in stage h.
/// phi[h] = delta_h - stages[h](h,h). All indices 0-based.
struct ScalarTableau {
  std::vector<Matrix> stages;
  Vector phi;
};

/// Throws ZeroPivot(h) when phi[h] == 0 for h < k-1.
ScalarTableau scalar_recursion(const TrustMatrix& c, std::span<const double> deltas);

/// delta_0 = c_00 + q_0, delta_h = m^{(h)}_hh + q_h, delta_{k-1} = m^{(k-1)}_{k-1,k-1}.
/// margins.size() must be k-1.
Vector gains_from_margins(const TrustMatrix& c, std::span<const double> margins);

struct PhiBlocks {
  std::vector<Matrix> phi;         // Phi_h = delta_h I - M_hh^{(h)}
  std::vector<Matrix> schur_diag;  // M_hh^{(h)}
  std::vector<bool> metzler;       // -Phi_h Metzler
  std::vector<bool> positive_off_diagonal;
  std::vector<bool> irreducible;   // -Phi_h, off-diagonal pattern above 1e-12
};

/// Block version of scalar_recursion on the adjacency, in the graph's own labels.
/// Throws IntermediateBlockNotPD(h) when Phi_h is not PD for h < k-1.
PhiBlocks matrix_phi_blocks(const SignedClusteredGraph& g, std::span<const double> deltas);

inline constexpr double kDefaultMargin = 1.0;
inline constexpr int kMaxDoublings = 60;

struct GainVector {
  Vector deltas;   // original cluster labels
  Vector margins;  // q_0..q_{k-2}, in ordering labels
  ClusterOrdering ordering;
  int doublings = 0;
};

/// Margin loop on the relabeled graph. Requires k >= 3 and q0 > 0.
/// Throws SynthesisFailed once kMaxDoublings retries are exhausted.
GainVector synthesize_gains(const SignedClusteredGraph& g, const TrustMatrix& c,
                            const ClusterOrdering& ordering, double q0 = kDefaultMargin);

/// Validates, certifies homogeneity, finds an ordering and synthesizes.
GainVector synthesize(const SignedClusteredGraph& g, double q0 = kDefaultMargin);

/// delta_i = 2 n_i - 1 for complete unweighted graphs. margins is empty.
GainVector complete_graph_gains(std::span<const std::size_t> sizes);

/// Gains in the ordering's labels: out[a] = gains.deltas[ordering.order[a]].
Vector ordered_deltas(const GainVector& gains);

}  // namespace kpartite
