#pragma once

#include <array>
#include <cstddef>
#include <cstdint>

#include "kpartite/assumptions.hpp"
#include "kpartite/graph.hpp"
#include "kpartite/matrix.hpp"

namespace kpartite::fixtures {

/// 7 agents in clusters of sizes 2, 4, 1 with unit signed weights.
SignedClusteredGraph example1_graph();
/// Homogeneity constants of example1_graph.
TrustMatrix example1_trust();

/// Gains with the kernel along (1,1,0,0,0,0,-1).
inline constexpr std::array<double, 3> kExample2Deltas{2.0, 5.0, 2.0};
/// Alternative gains with the kernel along (0,0,1,1,1,1,-2).
inline constexpr std::array<double, 3> kExample2AltDeltas{3.0, 4.0, 2.0};
/// Gains used for example 2 simulations (wider spectral gap than delta_2 = 5).
inline constexpr std::array<double, 3> kExample2SimDeltas{2.0, 10.0, 2.0};

inline constexpr std::array<std::size_t, 5> kExample3Sizes{9, 13, 14, 11, 7};
inline constexpr std::array<std::size_t, 4> kExample4Sizes{6, 9, 11, 7};

inline constexpr std::uint64_t kExample2Seed = 42;
inline constexpr std::uint64_t kExample3Seed = 7;
inline constexpr std::uint64_t kExample4Seed = 11;

}  // namespace kpartite::fixtures
