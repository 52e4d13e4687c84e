#include "kpartite/synthesis.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>

#include <fmt/format.h>

#include "kpartite/error.hpp"
#include "kpartite/linalg.hpp"
#include "kpartite/verification.hpp"

namespace kpartite {

namespace {

constexpr double kPatternThreshold = 1e-12;

// Dense block in extended precision; the elimination chains below lose
// several digits per stage in double at large gains.
struct Wide {
  std::size_t rows = 0, cols = 0;
  std::vector<long double> v;

  Wide() = default;
  Wide(std::size_t r, std::size_t c) : rows(r), cols(c), v(r * c, 0.0L) {}
  explicit Wide(const Matrix& m) : Wide(m.rows(), m.cols()) {
    for (std::size_t i = 0; i < rows; ++i)
      for (std::size_t j = 0; j < cols; ++j) (*this)(i, j) = m(i, j);
  }
  long double& operator()(std::size_t i, std::size_t j) { return v[i * cols + j]; }
  long double operator()(std::size_t i, std::size_t j) const { return v[i * cols + j]; }
  Matrix rounded() const {
    Matrix m(rows, cols);
    for (std::size_t i = 0; i < rows; ++i)
      for (std::size_t j = 0; j < cols; ++j) m(i, j) = static_cast<double>((*this)(i, j));
    return m;
  }
};

struct Elimination {
  std::vector<Matrix> stages;
  Vector phi;
  Vector deltas;
};

// Scalar elimination of D - C. With `margins`, delta_h = m_hh + q_h for h < k-1
// and delta_{k-1} = m_{k-1,k-1}; otherwise `values` are the deltas. The reported
// pivot is delta_h minus the rounded stage entry, so the last one cancels exactly.
Elimination eliminate(const TrustMatrix& c, std::span<const double> values, bool margins) {
  const std::size_t k = c.clusters();
  Wide m(c.c);
  Elimination e;
  e.phi.resize(k);
  e.deltas.resize(k);
  for (std::size_t h = 0; h < k; ++h) {
    e.stages.push_back(m.rounded());
    const double mhh = e.stages.back()(h, h);
    if (!margins)
      e.deltas[h] = values[h];
    else
      e.deltas[h] = h + 1 == k ? mhh : static_cast<double>(m(h, h) + values[h]);
    e.phi[h] = e.deltas[h] - mhh;
    if (h + 1 == k) break;
    const long double pivot = static_cast<long double>(e.deltas[h]) - m(h, h);
    if (e.phi[h] == 0.0 || pivot == 0.0L) throw ZeroPivot(h);
    Wide next = m;
    for (std::size_t i = h + 1; i < k; ++i)
      for (std::size_t j = h + 1; j < k; ++j) next(i, j) = m(i, j) + m(i, h) * m(h, j) / pivot;
    m = std::move(next);
  }
  return e;
}

std::optional<std::string> failing_check(const SignedClusteredGraph& g, std::span<const double> deltas) {
  const std::size_t k = g.clusters();
  PhiBlocks blocks;
  try {
    blocks = matrix_phi_blocks(g, deltas);
  } catch (const IntermediateBlockNotPD& e) {
    return fmt::format("Phi_{} not positive definite", e.stage() + 1);
  }
  for (std::size_t h = 2; h < k; ++h)
    if (!blocks.positive_off_diagonal[h])
      return fmt::format("M_{0}{0} off-diagonal not strictly positive", h + 1);
  if (!blocks.irreducible[k - 1]) return fmt::format("-Phi_{} not irreducible", k);
  if (!verify_lemma1(build_M(g, deltas), g.partition()).consensus())
    return std::string("M not singular PSD with block-constant kernel");
  return std::nullopt;
}

}  // namespace

ScalarTableau scalar_recursion(const TrustMatrix& c, std::span<const double> deltas) {
  const std::size_t k = c.clusters();
  if (deltas.size() != k)
    throw InvalidArgument(fmt::format("scalar_recursion: {} gains for {} clusters", deltas.size(), k));
  Elimination e = eliminate(c, deltas, false);
  return {std::move(e.stages), std::move(e.phi)};
}

Vector gains_from_margins(const TrustMatrix& c, std::span<const double> margins) {
  const std::size_t k = c.clusters();
  if (k < 2 || margins.size() != k - 1)
    throw InvalidArgument(fmt::format("gains_from_margins: {} margins for {} clusters", margins.size(), k));
  return eliminate(c, margins, true).deltas;
}

PhiBlocks matrix_phi_blocks(const SignedClusteredGraph& g, std::span<const double> deltas) {
  const std::size_t k = g.clusters();
  if (deltas.size() != k)
    throw InvalidArgument(fmt::format("matrix_phi_blocks: {} gains for {} clusters", deltas.size(), k));
  std::vector<std::vector<Wide>> m(k);
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j) m[i].emplace_back(g.block(i, j));

  PhiBlocks out;
  for (std::size_t h = 0; h < k; ++h) {
    const std::size_t n = m[h][h].rows;
    Wide phi(n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        phi(i, j) = (i == j ? static_cast<long double>(deltas[h]) : 0.0L) - 0.5L * (m[h][h](i, j) + m[h][h](j, i));
    const Matrix mhh = m[h][h].rounded();
    bool positive = true;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (i != j && !(mhh(i, j) > kPatternThreshold)) positive = false;
    out.metzler.push_back(is_metzler(mhh));
    out.positive_off_diagonal.push_back(positive);
    out.irreducible.push_back(is_irreducible(mhh, kPatternThreshold));
    out.schur_diag.push_back(mhh);
    out.phi.push_back(phi.rounded());
    if (h + 1 == k) break;

    if (!is_positive_definite(SymmetricMatrix(out.phi.back()))) throw IntermediateBlockNotPD(h);
    // Phi_h = L L^T; M_ij += (L^{-1} M_hi)^T (L^{-1} M_hj)
    Wide l(n, n);
    for (std::size_t j = 0; j < n; ++j) {
      long double d = phi(j, j);
      for (std::size_t q = 0; q < j; ++q) d -= l(j, q) * l(j, q);
      if (!(d > 0.0L)) throw IntermediateBlockNotPD(h);
      l(j, j) = std::sqrt(d);
      for (std::size_t i = j + 1; i < n; ++i) {
        long double s = phi(i, j);
        for (std::size_t q = 0; q < j; ++q) s -= l(i, q) * l(j, q);
        l(i, j) = s / l(j, j);
      }
    }
    std::vector<Wide> y(k);
    for (std::size_t j = h + 1; j < k; ++j) {
      Wide b = m[h][j];
      for (std::size_t col = 0; col < b.cols; ++col)
        for (std::size_t r = 0; r < n; ++r) {
          long double s = b(r, col);
          for (std::size_t q = 0; q < r; ++q) s -= l(r, q) * b(q, col);
          b(r, col) = s / l(r, r);
        }
      y[j] = std::move(b);
    }
    for (std::size_t i = h + 1; i < k; ++i)
      for (std::size_t j = h + 1; j < k; ++j)
        for (std::size_t r = 0; r < m[i][j].rows; ++r)
          for (std::size_t col = 0; col < m[i][j].cols; ++col) {
            long double s = 0.0L;
            for (std::size_t q = 0; q < n; ++q) s += y[i](q, r) * y[j](q, col);
            m[i][j](r, col) += s;
          }
  }
  return out;
}

GainVector synthesize_gains(const SignedClusteredGraph& g, const TrustMatrix& c,
                            const ClusterOrdering& ordering, double q0) {
  const std::size_t k = g.clusters();
  if (k < 3) throw InvalidArgument(fmt::format("synthesis requires k >= 3 clusters, got {}", k));
  if (!(q0 > 0.0)) throw InvalidArgument(fmt::format("initial margin must be positive, got {}", q0));
  if (c.clusters() != k) throw InvalidArgument("synthesize_gains: trust matrix size mismatch");

  const RelabeledGraph rg = relabel(g, ordering);
  const TrustMatrix cp = permute(c, ordering.order);
  Vector q(k - 1, q0);
  for (int doublings = 0;; ++doublings) {
    const Vector deltas = gains_from_margins(cp, q);
    const auto failure = failing_check(rg.graph, deltas);
    if (!failure) {
      GainVector out;
      out.deltas.resize(k);
      for (std::size_t a = 0; a < k; ++a) out.deltas[ordering.order[a]] = deltas[a];
      const ScalarTableau t = scalar_recursion(cp, deltas);
      out.margins.assign(t.phi.begin(), t.phi.end() - 1);
      out.ordering = ordering;
      out.doublings = doublings;
      return out;
    }
    if (doublings == kMaxDoublings) throw SynthesisFailed(doublings, *failure);
    for (std::size_t h = 1; h + 1 < k; ++h) q[h] *= 2.0;
  }
}

GainVector synthesize(const SignedClusteredGraph& g, double q0) {
  const ValidationReport report = validate_assumption1(g);
  if (!report.passed())
    throw AssumptionViolation(fmt::format("assumption 1 violated: {}", report.violations.front().message));
  if (g.clusters() < 3)
    throw InvalidArgument(fmt::format("synthesis requires k >= 3 clusters, got {}", g.clusters()));
  const TrustMatrix c = homogeneity_certificate(g);
  const ClusterOrdering ordering = find_ordering(g);
  return synthesize_gains(g, c, ordering, q0);
}

GainVector complete_graph_gains(std::span<const std::size_t> sizes) {
  if (sizes.size() < 2)
    throw InvalidArgument(fmt::format("complete_graph_gains requires k >= 2, got {}", sizes.size()));
  GainVector out;
  for (std::size_t n : sizes) {
    if (n == 0) throw InvalidArgument("complete_graph_gains: empty cluster");
    out.deltas.push_back(2.0 * static_cast<double>(n) - 1.0);
  }
  std::vector<std::size_t> order(sizes.size());
  std::iota(order.begin(), order.end(), 0);
  out.ordering = make_ordering(ClusterPartition(std::vector<std::size_t>(sizes.begin(), sizes.end())),
                               std::move(order));
  return out;
}

Vector ordered_deltas(const GainVector& gains) {
  Vector out;
  for (std::size_t c : gains.ordering.order) out.push_back(gains.deltas.at(c));
  return out;
}

}  // namespace kpartite
