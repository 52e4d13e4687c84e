#include "kpartite/graph.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <sstream>

#include <fmt/format.h>

#include "json.hpp"
#include "kpartite/error.hpp"

namespace kpartite {

using json = nlohmann::json;

ClusterPartition::ClusterPartition(std::vector<std::size_t> sizes) : sizes_(std::move(sizes)) {
  offsets_.reserve(sizes_.size());
  for (std::size_t i = 0; i < sizes_.size(); ++i) {
    if (sizes_[i] == 0) throw InvalidArgument(fmt::format("cluster {} is empty", i));
    offsets_.push_back(total_);
    total_ += sizes_[i];
  }
}

std::size_t ClusterPartition::cluster_of(std::size_t agent) const {
  if (agent >= total_) throw InvalidArgument(fmt::format("agent {} out of range", agent));
  const auto it = std::upper_bound(offsets_.begin(), offsets_.end(), agent);
  return static_cast<std::size_t>(it - offsets_.begin()) - 1;
}

SignedClusteredGraph::SignedClusteredGraph(ClusterPartition partition, Matrix adjacency)
    : partition_(std::move(partition)), adjacency_(std::move(adjacency)) {
  if (!adjacency_.square())
    throw InvalidArgument(fmt::format("adjacency is {}x{}, not square", adjacency_.rows(),
                                      adjacency_.cols()));
  if (adjacency_.rows() != partition_.agents())
    throw InvalidArgument(fmt::format("cluster sizes sum to {} but adjacency has {} rows",
                                      partition_.agents(), adjacency_.rows()));
}

Matrix SignedClusteredGraph::block(std::size_t i, std::size_t j) const {
  return adjacency_.block(partition_.offset(i), partition_.offset(j), partition_.size(i),
                          partition_.size(j));
}

namespace {

std::string parse_error_context(std::string_view doc, const json::parse_error& e) {
  const std::size_t pos = std::min<std::size_t>(e.byte, doc.size());
  const auto line = 1 + std::count(doc.begin(), doc.begin() + static_cast<std::ptrdiff_t>(pos), '\n');
  return fmt::format("line {}: {}", line, e.what());
}

double read_number(const json& v, const std::string& field) {
  if (!v.is_number()) throw FormatError(fmt::format("{}: expected a number", field));
  return v.get<double>();
}

json parse(std::string_view document) {
  try {
    return json::parse(document.begin(), document.end());
  } catch (const json::parse_error& e) {
    throw FormatError(parse_error_context(document, e));
  }
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError(fmt::format("cannot open {}", path.string()));
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

SignedClusteredGraph load_graph(std::string_view document) {
  const json doc = parse(document);
  if (!doc.is_object()) throw FormatError("document: expected an object");
  if (!doc.contains("clusters")) throw FormatError("clusters: missing field");
  if (!doc.contains("adjacency")) throw FormatError("adjacency: missing field");

  const json& cl = doc["clusters"];
  if (!cl.is_array() || cl.empty()) throw FormatError("clusters: expected a non-empty array");
  std::vector<std::size_t> sizes;
  for (std::size_t i = 0; i < cl.size(); ++i) {
    if (!cl[i].is_number_integer() || cl[i].get<long long>() < 1)
      throw FormatError(fmt::format("clusters[{}]: expected a positive integer", i));
    sizes.push_back(cl[i].get<std::size_t>());
  }
  const std::size_t n = std::accumulate(sizes.begin(), sizes.end(), std::size_t{0});

  const json& adj = doc["adjacency"];
  if (!adj.is_array()) throw FormatError("adjacency: expected an array of rows");
  if (adj.size() != n)
    throw FormatError(fmt::format("adjacency: {} rows but clusters sum to {}", adj.size(), n));
  Matrix a(n, n);
  for (std::size_t r = 0; r < n; ++r) {
    const json& row = adj[r];
    if (!row.is_array() || row.size() != n)
      throw FormatError(fmt::format("adjacency[{}]: expected {} entries", r, n));
    for (std::size_t c = 0; c < n; ++c)
      a(r, c) = read_number(row[c], fmt::format("adjacency[{}][{}]", r, c));
  }
  return SignedClusteredGraph(ClusterPartition(std::move(sizes)), std::move(a));
}

SignedClusteredGraph load_graph_file(const std::filesystem::path& path) {
  return load_graph(read_file(path));
}

std::string save_graph(const SignedClusteredGraph& g) {
  json doc;
  doc["clusters"] = g.partition().sizes();
  json rows = json::array();
  for (std::size_t r = 0; r < g.agents(); ++r) {
    const auto row = g.adjacency().row(r);
    rows.push_back(std::vector<double>(row.begin(), row.end()));
  }
  doc["adjacency"] = std::move(rows);
  return doc.dump() + "\n";
}

void save_graph_file(const SignedClusteredGraph& g, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError(fmt::format("cannot write {}", path.string()));
  out << save_graph(g);
}

ValidationReport validate_assumption1(const SignedClusteredGraph& g) {
  ValidationReport report;
  auto add = [&](std::string rule, std::string loc, std::string msg) {
    report.violations.push_back({std::move(rule), std::move(loc), std::move(msg)});
  };
  const auto& a = g.adjacency();
  const auto& part = g.partition();
  const std::size_t n = g.agents();

  if (part.clusters() < 2)
    add("clusters", "", fmt::format("need at least 2 clusters, got {}", part.clusters()));

  for (std::size_t i = 0; i < n; ++i) {
    if (a(i, i) != 0.0)
      add("zero-diagonal", fmt::format("{}", i), fmt::format("diagonal entry at ({},{}) is {}", i, i, a(i, i)));
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      if (j > i && a(i, j) != a(j, i))
        add("symmetry", fmt::format("({},{})", i, j),
            fmt::format("symmetry violation at ({},{}): {} vs {}", i, j, a(i, j), a(j, i)));
      const bool same = part.cluster_of(i) == part.cluster_of(j);
      if ((same && a(i, j) < 0.0) || (!same && a(i, j) > 0.0))
        add("sign-pattern", fmt::format("({},{})", i, j),
            fmt::format("sign-pattern at ({},{}): {} {} required", i, j,
                        same ? "nonnegative" : "nonpositive",
                        same ? "inside a cluster" : "across clusters"));
    }
  }

  if (n > 0) {
    std::vector<char> seen(n, 0);
    std::vector<std::size_t> queue{0};
    seen[0] = 1;
    for (std::size_t head = 0; head < queue.size(); ++head) {
      const std::size_t i = queue[head];
      for (std::size_t j = 0; j < n; ++j)
        if (!seen[j] && (a(i, j) != 0.0 || a(j, i) != 0.0)) {
          seen[j] = 1;
          queue.push_back(j);
        }
    }
    if (queue.size() != n)
      add("disconnected", "",
          fmt::format("disconnected: only {} of {} agents reachable from agent 0", queue.size(), n));
  }
  return report;
}

SignedClusteredGraph build_complete_unweighted(std::span<const std::size_t> sizes) {
  if (sizes.empty()) throw InvalidArgument("build_complete_unweighted: empty sizes");
  ClusterPartition part(std::vector<std::size_t>(sizes.begin(), sizes.end()));
  const std::size_t n = part.agents();
  Matrix a(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j) a(i, j) = part.cluster_of(i) == part.cluster_of(j) ? 1.0 : -1.0;
  return SignedClusteredGraph(std::move(part), std::move(a));
}

bool is_complete_unweighted(const SignedClusteredGraph& g) {
  const auto& sizes = g.partition().sizes();
  return g.adjacency() == build_complete_unweighted(sizes).adjacency();
}

Vector load_vector(std::string_view document) {
  const json doc = parse(document);
  if (!doc.is_array()) throw FormatError("state: expected a flat array of numbers");
  Vector v;
  v.reserve(doc.size());
  for (std::size_t i = 0; i < doc.size(); ++i) v.push_back(read_number(doc[i], fmt::format("[{}]", i)));
  return v;
}

Vector load_vector_file(const std::filesystem::path& path) { return load_vector(read_file(path)); }

}  // namespace kpartite
