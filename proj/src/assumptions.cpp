#include "kpartite/assumptions.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include <fmt/format.h>

#include "kpartite/error.hpp"
#include "kpartite/linalg.hpp"

namespace kpartite {

namespace {

constexpr double kStrictPositive = 1e-12;

void check_cluster(const SignedClusteredGraph& g, std::size_t cluster) {
  if (cluster >= g.clusters())
    throw InvalidArgument(fmt::format("cluster index {} out of range (k = {})", cluster, g.clusters()));
}

}  // namespace

TrustMatrix homogeneity_certificate(const SignedClusteredGraph& g, double tol) {
  const auto& part = g.partition();
  const std::size_t k = part.clusters();
  Matrix c(k, k);
  Matrix spread(k, k);
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      double lo = INFINITY, hi = -INFINITY, sum = 0.0;
      for (std::size_t r = 0; r < part.size(i); ++r) {
        double rs = 0.0;
        for (std::size_t t = 0; t < part.size(j); ++t)
          rs += g(part.offset(i) + r, part.offset(j) + t);
        lo = std::min(lo, rs);
        hi = std::max(hi, rs);
        sum += rs;
      }
      c(i, j) = sum / static_cast<double>(part.size(i));
      spread(i, j) = hi - lo;
    }
  }
  const double limit = tol * c.max_abs();
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j)
      if (spread(i, j) > limit) throw HomogeneityViolation(i, j, spread(i, j));
  return TrustMatrix{std::move(c)};
}

std::vector<std::vector<std::size_t>> familiarity_components(const SignedClusteredGraph& g,
                                                             std::size_t cluster) {
  check_cluster(g, cluster);
  const std::size_t first = g.partition().offset(cluster);
  const std::size_t n = g.partition().size(cluster);
  std::vector<char> seen(n, 0);
  std::vector<std::vector<std::size_t>> components;
  for (std::size_t s = 0; s < n; ++s) {
    if (seen[s]) continue;
    std::vector<std::size_t> comp{first + s};
    seen[s] = 1;
    for (std::size_t head = 0; head < comp.size(); ++head) {
      const std::size_t i = comp[head];
      for (std::size_t t = 0; t < n; ++t)
        if (!seen[t] && g(i, first + t) > 0.0) {
          seen[t] = 1;
          comp.push_back(first + t);
        }
    }
    std::sort(comp.begin(), comp.end());
    components.push_back(std::move(comp));
  }
  return components;
}

std::vector<bool> close_friendship_check(const SignedClusteredGraph& g, std::size_t hub) {
  check_cluster(g, hub);
  const auto& part = g.partition();
  const std::size_t hub_first = part.offset(hub);
  const std::size_t hub_size = part.size(hub);

  std::vector<std::size_t> component_of(hub_size);
  const auto comps = familiarity_components(g, hub);
  for (std::size_t c = 0; c < comps.size(); ++c)
    for (std::size_t agent : comps[c]) component_of[agent - hub_first] = c;

  // Hub components holding at least one enemy of agent i.
  auto enemy_components = [&](std::size_t i) {
    std::set<std::size_t> out;
    for (std::size_t r = 0; r < hub_size; ++r)
      if (g(i, hub_first + r) < 0.0) out.insert(component_of[r]);
    return out;
  };

  std::vector<bool> result(part.clusters(), true);
  for (std::size_t h = 0; h < part.clusters(); ++h) {
    if (h == hub || part.size(h) == 1) continue;
    const std::size_t first = part.offset(h);
    std::vector<std::set<std::size_t>> enemies;
    for (std::size_t t = 0; t < part.size(h); ++t) enemies.push_back(enemy_components(first + t));
    bool ok = true;
    for (std::size_t a = 0; a < part.size(h) && ok; ++a) {
      for (std::size_t b = a + 1; b < part.size(h) && ok; ++b) {
        if (g(first + a, first + b) > 0.0) continue;
        ok = std::any_of(enemies[a].begin(), enemies[a].end(),
                         [&](std::size_t c) { return enemies[b].count(c) > 0; });
      }
    }
    result[h] = ok;
  }
  return result;
}

Matrix close_friendship_matrix(const SignedClusteredGraph& g, std::size_t hub, std::size_t h,
                               double delta_hub) {
  check_cluster(g, hub);
  check_cluster(g, h);
  if (h == hub) throw InvalidArgument("close_friendship_matrix: h must differ from hub");
  Matrix shifted = g.block(hub, hub) * -1.0;
  for (std::size_t i = 0; i < shifted.rows(); ++i) shifted(i, i) += delta_hub;
  const SymmetricMatrix s(std::move(shifted));
  if (!is_positive_definite(s))
    throw NotPositiveDefinite(fmt::format(
        "delta_hub I - A_hub,hub is not positive definite for delta_hub = {}", delta_hub));
  const Matrix inv = inverse_spd(s);
  return g.block(h, h) + g.block(h, hub) * inv * g.block(hub, h);
}

bool verify_ass3_matrix_form(const SignedClusteredGraph& g, std::size_t hub, std::size_t h,
                             double delta_hub) {
  const Matrix m = close_friendship_matrix(g, hub, h, delta_hub);
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j)
      if (i != j && !(m(i, j) > kStrictPositive)) return false;
  return true;
}

ClusterOrdering make_ordering(const ClusterPartition& partition, std::vector<std::size_t> order) {
  const std::size_t k = partition.clusters();
  std::vector<std::size_t> sorted = order;
  std::sort(sorted.begin(), sorted.end());
  std::vector<std::size_t> expected(k);
  std::iota(expected.begin(), expected.end(), 0);
  if (k < 2 || sorted != expected)
    throw InvalidArgument("ordering is not a permutation of the clusters");

  ClusterOrdering o;
  o.hub = order[0];
  o.exempt = order[1];
  o.agent_permutation.reserve(partition.agents());
  for (std::size_t c : order)
    for (std::size_t t = 0; t < partition.size(c); ++t)
      o.agent_permutation.push_back(partition.offset(c) + t);
  o.order = std::move(order);
  return o;
}

ClusterOrdering find_ordering(const SignedClusteredGraph& g) {
  const std::size_t k = g.clusters();
  if (k < 3) throw InvalidArgument(fmt::format("cluster ordering requires k >= 3, got {}", k));
  std::vector<std::vector<std::size_t>> failures(k);
  for (std::size_t hub = 0; hub < k; ++hub) {
    const std::vector<bool> ok = close_friendship_check(g, hub);
    for (std::size_t h = 0; h < k; ++h)
      if (!ok[h]) failures[hub].push_back(h);
    if (failures[hub].size() > 1) continue;

    std::size_t exempt = failures[hub].empty() ? (hub == 0 ? 1 : 0) : failures[hub].front();
    std::vector<std::size_t> order{hub, exempt};
    for (std::size_t h = 0; h < k; ++h)
      if (h != hub && h != exempt) order.push_back(h);
    return make_ordering(g.partition(), std::move(order));
  }
  throw Assumption3Violation(std::move(failures));
}

RelabeledGraph relabel(const SignedClusteredGraph& g, const ClusterOrdering& ordering) {
  const ClusterOrdering expected = make_ordering(g.partition(), ordering.order);
  if (expected.agent_permutation != ordering.agent_permutation || expected.hub != ordering.hub ||
      expected.exempt != ordering.exempt)
    throw InvalidArgument("relabel: ordering is inconsistent with the graph partition");

  const auto& perm = ordering.agent_permutation;
  const std::size_t n = g.agents();
  Matrix a(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) a(i, j) = g(perm[i], perm[j]);
  std::vector<std::size_t> sizes;
  for (std::size_t c : ordering.order) sizes.push_back(g.partition().size(c));
  return {SignedClusteredGraph(ClusterPartition(std::move(sizes)), std::move(a)), perm};
}

TrustMatrix permute(const TrustMatrix& c, const std::vector<std::size_t>& order) {
  const std::size_t k = c.clusters();
  if (order.size() != k) throw InvalidArgument("permute: order length mismatch");
  Matrix out(k, k);
  for (std::size_t a = 0; a < k; ++a)
    for (std::size_t b = 0; b < k; ++b) out(a, b) = c(order[a], order[b]);
  return TrustMatrix{std::move(out)};
}

}  // namespace kpartite
