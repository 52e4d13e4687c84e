#include "kpartite/fixtures.hpp"

namespace kpartite::fixtures {

SignedClusteredGraph example1_graph() {
  Matrix a{{0, 1, -1, -1, 0, 0, -1},
           {1, 0, 0, 0, -1, -1, -1},
           {-1, 0, 0, 1, 1, 0, -1},
           {-1, 0, 1, 0, 0, 1, -1},
           {0, -1, 1, 0, 0, 1, -1},
           {0, -1, 0, 1, 1, 0, -1},
           {-1, -1, -1, -1, -1, -1, 0}};
  return SignedClusteredGraph(ClusterPartition({2, 4, 1}), std::move(a));
}

TrustMatrix example1_trust() {
  return TrustMatrix{Matrix{{1, -2, -1}, {-1, 2, -1}, {-2, -4, 0}}};
}

}  // namespace kpartite::fixtures
