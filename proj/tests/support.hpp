#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "kpartite/graph.hpp"
#include "kpartite/linalg.hpp"
#include "kpartite/matrix.hpp"

namespace testing {

using kpartite::ClusterPartition;
using kpartite::Matrix;
using kpartite::SignedClusteredGraph;
using kpartite::Vector;

inline Eigen::MatrixXd to_eigen(const Matrix& m) {
  Eigen::MatrixXd e(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) e(i, j) = m(i, j);
  return e;
}

inline Matrix from_eigen(const Eigen::MatrixXd& e) {
  Matrix m(e.rows(), e.cols());
  for (Eigen::Index i = 0; i < e.rows(); ++i)
    for (Eigen::Index j = 0; j < e.cols(); ++j) m(i, j) = e(i, j);
  return m;
}

inline Eigen::VectorXd eigen_values(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(to_eigen(m));
  return es.eigenvalues();
}

inline double max_abs_diff(const Matrix& a, const Matrix& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) d = std::max(d, std::abs(a(i, j) - b(i, j)));
  return d;
}

inline double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

inline Matrix random_symmetric(std::size_t n, std::mt19937_64& gen, double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  Matrix a(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) a(i, j) = a(j, i) = u(gen);
  return a;
}

/// Symmetric, zero diagonal, nonnegative off-diagonal with the given density.
inline Matrix random_metzler_offdiag(std::size_t n, std::mt19937_64& gen, double density = 0.6) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Matrix a(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (u(gen) < density) a(i, j) = a(j, i) = 0.1 + u(gen);
  return a;
}

/// Unit-norm vector, first entry above 1e-12 made positive.
inline Eigen::VectorXd canonical(Eigen::VectorXd v) {
  v.normalize();
  for (Eigen::Index i = 0; i < v.size(); ++i)
    if (std::abs(v(i)) > 1e-12) {
      if (v(i) < 0) v = -v;
      break;
    }
  return v;
}

struct GeneratedGraph {
  SignedClusteredGraph graph;
  std::size_t hub;     // cluster intended as hub
  std::size_t exempt;  // cluster exempt from close friendship
};

/// Homogeneous signed clustered graph satisfying connectivity, the sign
/// pattern, homogeneity and close friendship by construction. The hub has a
/// complete friendly block; every other cluster except the exempt one is either
/// internally complete or has an enemy in the hub for each member. Inter-cluster
/// blocks are empty, uniformly hostile, or a hostile matching between equal-size
/// clusters. Cluster labels are shuffled.
inline GeneratedGraph random_homogeneous_graph(std::mt19937_64& gen, std::size_t k, std::size_t max_size) {
  std::uniform_int_distribution<std::size_t> size_dist(1, max_size);
  std::uniform_real_distribution<double> weight(0.5, 2.0);
  std::uniform_int_distribution<int> coin(0, 2);
  while (true) {
    std::vector<std::size_t> sizes(k);
    for (auto& s : sizes) s = size_dist(gen);
    // natural labels: 0 = hub, 1 = exempt
    std::vector<std::vector<Matrix>> blocks(k, std::vector<Matrix>(k));
    std::vector<bool> complete(k);
    for (std::size_t i = 0; i < k; ++i) {
      complete[i] = i == 0 || coin(gen) == 0;
      const double w = weight(gen);
      blocks[i][i] = Matrix(sizes[i], sizes[i]);
      if (complete[i])
        for (std::size_t a = 0; a < sizes[i]; ++a)
          for (std::size_t b = 0; b < sizes[i]; ++b)
            if (a != b) blocks[i][i](a, b) = w;
    }
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = i + 1; j < k; ++j) {
        const bool needs_cover = i == 0 && j >= 2 && !complete[j];
        int kind = coin(gen);  // 0 empty, 1 dense, 2 matching
        if (kind == 2 && sizes[i] != sizes[j]) kind = 1;
        if (needs_cover && kind == 0) kind = 1;
        const double w = weight(gen);
        Matrix b(sizes[i], sizes[j]);
        if (kind == 1)
          for (std::size_t r = 0; r < sizes[i]; ++r)
            for (std::size_t c = 0; c < sizes[j]; ++c) b(r, c) = -w;
        if (kind == 2) {
          std::vector<std::size_t> perm(sizes[i]);
          std::iota(perm.begin(), perm.end(), 0);
          std::shuffle(perm.begin(), perm.end(), gen);
          for (std::size_t r = 0; r < sizes[i]; ++r) b(r, perm[r]) = -w;
        }
        blocks[i][j] = b;
        blocks[j][i] = b.transposed();
      }

    std::vector<std::size_t> label(k);  // label[natural] = shuffled position
    std::iota(label.begin(), label.end(), 0);
    std::shuffle(label.begin(), label.end(), gen);
    std::vector<std::size_t> natural(k);
    for (std::size_t c = 0; c < k; ++c) natural[label[c]] = c;

    std::vector<std::size_t> shuffled_sizes(k);
    for (std::size_t p = 0; p < k; ++p) shuffled_sizes[p] = sizes[natural[p]];
    ClusterPartition part(shuffled_sizes);
    Matrix a(part.agents(), part.agents());
    for (std::size_t p = 0; p < k; ++p)
      for (std::size_t q = 0; q < k; ++q) a.set_block(part.offset(p), part.offset(q), blocks[natural[p]][natural[q]]);
    SignedClusteredGraph g(part, std::move(a));
    if (!kpartite::validate_assumption1(g).passed()) continue;
    return {std::move(g), label[0], label[1]};
  }
}

}  // namespace testing
