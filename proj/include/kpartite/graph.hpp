#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "kpartite/matrix.hpp"

namespace kpartite {

/// Agents are ordered cluster by cluster: cluster i owns the index range
/// [offset(i), offset(i) + size(i)).
class ClusterPartition {
 public:
  ClusterPartition() = default;
  explicit ClusterPartition(std::vector<std::size_t> sizes);

  std::size_t clusters() const noexcept { return sizes_.size(); }
  std::size_t agents() const noexcept { return total_; }
  std::size_t size(std::size_t cluster) const { return sizes_.at(cluster); }
  std::size_t offset(std::size_t cluster) const { return offsets_.at(cluster); }
  std::size_t cluster_of(std::size_t agent) const;
  const std::vector<std::size_t>& sizes() const noexcept { return sizes_; }

  friend bool operator==(const ClusterPartition&, const ClusterPartition&) = default;

 private:
  std::vector<std::size_t> sizes_;
  std::vector<std::size_t> offsets_;
  std::size_t total_ = 0;
};

/// Signed weighted adjacency plus its cluster partition. Shape is checked on
/// construction; the Assumption 1 properties are checked by validate_assumption1.
class SignedClusteredGraph {
 public:
  SignedClusteredGraph(ClusterPartition partition, Matrix adjacency);

  const ClusterPartition& partition() const noexcept { return partition_; }
  const Matrix& adjacency() const noexcept { return adjacency_; }
  std::size_t agents() const noexcept { return adjacency_.rows(); }
  std::size_t clusters() const noexcept { return partition_.clusters(); }
  double operator()(std::size_t i, std::size_t j) const { return adjacency_(i, j); }

  /// The n_i x n_j block A_{i,j}.
  Matrix block(std::size_t i, std::size_t j) const;

 private:
  ClusterPartition partition_;
  Matrix adjacency_;
};

struct Violation {
  std::string rule;      // symmetry | zero-diagonal | sign-pattern | disconnected | clusters
  std::string location;  // "(i,j)", "i", or empty
  std::string message;
};

struct ValidationReport {
  std::vector<Violation> violations;
  bool passed() const noexcept { return violations.empty(); }
};

/// Parses the JSON graph document {"clusters": [...], "adjacency": [[...], ...]}.
/// Only the shape is checked. Throws FormatError with field context.
SignedClusteredGraph load_graph(std::string_view document);
SignedClusteredGraph load_graph_file(const std::filesystem::path& path);

/// Serializes with round-trip precision; load_graph(save_graph(g)) reproduces g bit-exactly.
std::string save_graph(const SignedClusteredGraph& g);
void save_graph_file(const SignedClusteredGraph& g, const std::filesystem::path& path);

/// Symmetry, zero diagonal, block sign pattern, connectedness and k >= 2.
ValidationReport validate_assumption1(const SignedClusteredGraph& g);

/// Diagonal blocks 1 1^T - I, off-diagonal blocks -1 1^T.
SignedClusteredGraph build_complete_unweighted(std::span<const std::size_t> sizes);

/// True iff g is exactly the output of build_complete_unweighted for its sizes.
bool is_complete_unweighted(const SignedClusteredGraph& g);

/// Reads a flat JSON array of reals.
Vector load_vector(std::string_view document);
Vector load_vector_file(const std::filesystem::path& path);

}  // namespace kpartite
