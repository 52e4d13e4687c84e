#include "kpartite/cli.hpp"

#include <cmath>
#include <fstream>
#include <ostream>
#include <string>
#include <vector>

#include <fmt/format.h>
#include <fmt/ostream.h>
#include <fmt/ranges.h>

#include "CLI11.hpp"
#include "json.hpp"
#include "kpartite/assumptions.hpp"
#include "kpartite/error.hpp"
#include "kpartite/fixtures.hpp"
#include "kpartite/graph.hpp"
#include "kpartite/simulate.hpp"
#include "kpartite/synthesis.hpp"
#include "kpartite/verification.hpp"

namespace kpartite {

namespace {

using nlohmann::json;

struct Options {
  std::string graph;
  std::vector<double> deltas;
  std::uint64_t seed = 0;
  std::string x0;
  double dt = kDefaultDt;
  double t_end = kDefaultTEnd;
  double tol = kConsensusTol;
  std::string method = "exact";
  std::string profile;
  double q0 = kDefaultMargin;
  std::string out;
  std::size_t stride = 10;
  bool complete = false;
  int example = 0;
};

// 1-based cluster labels for display.
std::vector<std::size_t> one_based(const std::vector<std::size_t>& v) {
  std::vector<std::size_t> out;
  for (std::size_t x : v) out.push_back(x + 1);
  return out;
}

void print_trust(std::ostream& out, const TrustMatrix& c) {
  fmt::print(out, "trust matrix c_ij ({} clusters):\n", c.clusters());
  for (std::size_t i = 0; i < c.clusters(); ++i) {
    std::vector<double> row;
    for (std::size_t j = 0; j < c.clusters(); ++j) row.push_back(c(i, j));
    fmt::print(out, "  {:.12g}\n", fmt::join(row, " "));
  }
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path);
  if (!f) throw FormatError(fmt::format("cannot open '{}' for writing", path));
  f << text;
  if (!f) throw FormatError(fmt::format("write to '{}' failed", path));
}

SignedClusteredGraph validated_graph(const Options& o) {
  SignedClusteredGraph g = load_graph_file(o.graph);
  const ValidationReport r = validate_assumption1(g);
  if (!r.passed()) throw AssumptionViolation(r.violations.front().message);
  return g;
}

int cmd_validate(const Options& o, std::ostream& out) {
  const SignedClusteredGraph g = load_graph_file(o.graph);
  const ValidationReport r = validate_assumption1(g);
  for (const Violation& v : r.violations) fmt::print(out, "{}\n", v.message);
  if (!r.passed()) return kExitAssumption;
  fmt::print(out, "ok: {} agents in {} clusters\n", g.agents(), g.clusters());
  return kExitOk;
}

int cmd_analyze(const Options& o, std::ostream& out) {
  const SignedClusteredGraph g = validated_graph(o);
  print_trust(out, homogeneity_certificate(g));
  if (g.clusters() < 3) {
    fmt::print(out, "ordering: not applicable (k = {})\n", g.clusters());
    return kExitOk;
  }
  const ClusterOrdering ord = find_ordering(g);
  fmt::print(out, "hub={} exempt={} order={}\n", ord.hub + 1, ord.exempt + 1,
             fmt::join(one_based(ord.order), ","));
  return kExitOk;
}

int cmd_synthesize(const Options& o, std::ostream& out) {
  const SignedClusteredGraph g = validated_graph(o);
  GainVector gains;
  if (o.complete) {
    if (!is_complete_unweighted(g))
      throw AssumptionViolation("closed form requires complete unweighted graph");
    gains = complete_graph_gains(g.partition().sizes());
  } else {
    gains = synthesize(g, o.q0);
  }
  fmt::print(out, "deltas: {:.17g}\n", fmt::join(gains.deltas, ", "));
  if (!gains.margins.empty()) fmt::print(out, "margins: {:.17g}\n", fmt::join(gains.margins, ", "));
  fmt::print(out, "order: {}\n", fmt::join(one_based(gains.ordering.order), ","));
  if (!o.complete) fmt::print(out, "doublings: {}\n", gains.doublings);
  if (!o.out.empty()) {
    json doc = {{"deltas", gains.deltas},
                {"margins", gains.margins},
                {"order", one_based(gains.ordering.order)},
                {"doublings", gains.doublings}};
    write_text(o.out, doc.dump(2) + "\n");
  }
  return kExitOk;
}

json kernel_json(const KernelReport& r) {
  return {{"psd", r.is_psd},
          {"min_eigenvalue", r.min_eigenvalue},
          {"zero_multiplicity", r.zero_multiplicity},
          {"block_constant", r.block_constant},
          {"max_block_deviation", r.max_block_deviation},
          {"alphas", r.alphas}};
}

int cmd_verify(const Options& o, std::ostream& out) {
  const SignedClusteredGraph g = validated_graph(o);
  const KernelReport r = verify_lemma1(build_M(g, o.deltas), g.partition());
  out << kernel_json(r).dump(2) << "\n";
  return r.consensus() ? kExitOk : kExitAssumption;
}

int cmd_simulate(const Options& o, std::ostream& out) {
  const SignedClusteredGraph g = validated_graph(o);
  const SymmetricMatrix m = build_M(g, o.deltas);
  const Vector x0 = o.x0.empty() ? gaussian_initial_state(g.agents(), o.seed) : load_vector_file(o.x0);
  if (x0.size() != g.agents())
    throw FormatError(fmt::format("{}: {} entries but the graph has {} agents", o.x0, x0.size(), g.agents()));
  const NonlinearProfile profile = o.profile.empty()
                                       ? NonlinearProfile::uniform(g.clusters(), ScalarMap::Identity)
                                       : parse_profile(o.profile, g.clusters());
  bool linear = true;
  for (ScalarMap f : profile.maps()) linear = linear && f == ScalarMap::Identity;
  if (o.method == "exact" && !linear) throw InvalidArgument("--method exact supports only the identity profile");

  const Trajectory traj = o.method == "exact"
                              ? simulate_linear_exact(m, x0, time_grid(o.dt, o.t_end, o.stride))
                              : simulate_rk4(nonlinear_field(m, profile, g.partition()), x0, o.dt, o.t_end,
                                             o.stride);
  const double window = std::min(kConsensusWindow, o.t_end);
  ConsensusReport rep = detect_consensus(traj, g.partition(), o.tol, window);

  json doc;
  if (linear) {
    const Vector predicted = predict_steady_state(m, x0);
    double d = 0.0;
    for (std::size_t i = 0; i < predicted.size(); ++i)
      d = std::max(d, std::abs(predicted[i] - traj.states.back()[i]));
    rep.predicted_match = d;
  } else {
    const Equilibrium eq = lyapunov_reference(m, profile, g.partition(), rep.cluster_values);
    double worst = -INFINITY;
    double prev = lyapunov_V(traj.states.front(), eq.x_star, profile, g.partition());
    for (std::size_t s = 1; s < traj.states.size(); ++s) {
      const double v = lyapunov_V(traj.states[s], eq.x_star, profile, g.partition());
      worst = std::max(worst, v - prev);
      prev = v;
    }
    doc["lyapunov"] = {{"x_star_in_range", eq.in_range}, {"max_increase", worst}};
  }
  doc["reached"] = rep.reached;
  doc["convergence_time"] = rep.convergence_time ? json(*rep.convergence_time) : json(nullptr);
  doc["cluster_values"] = rep.cluster_values;
  doc["max_intra_cluster_spread"] = rep.max_intra_cluster_spread;
  doc["predicted_match"] = rep.predicted_match ? json(*rep.predicted_match) : json(nullptr);
  doc["method"] = o.method;
  doc["samples"] = traj.times.size();
  if (!o.out.empty()) write_trajectory_csv(traj, o.out);
  out << doc.dump(2) << "\n";
  return kExitOk;
}

class Checklist {
 public:
  explicit Checklist(std::ostream& out) : out_(out) {}
  void check(bool ok, const std::string& what) {
    fmt::print(out_, "{} {}\n", ok ? "PASS" : "FAIL", what);
    all_ = all_ && ok;
  }
  int exit_code() const { return all_ ? kExitOk : kExitAssumption; }

 private:
  std::ostream& out_;
  bool all_ = true;
};

bool parallel_to(const Vector& v, Vector expected, double tol) {
  expected = sign_normalized(std::move(expected));
  const Vector u = sign_normalized(v);
  double d = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) d = std::max(d, std::abs(u[i] - expected[i]));
  return d <= tol;
}

int reproduce1(std::ostream& out) {
  Checklist cl(out);
  const TrustMatrix c = homogeneity_certificate(fixtures::example1_graph());
  const TrustMatrix expected = fixtures::example1_trust();
  print_trust(out, c);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j)
      cl.check(c(i, j) == expected(i, j), fmt::format("c_{}{} = {}", i + 1, j + 1, expected(i, j)));
  const ClusterOrdering ord = find_ordering(fixtures::example1_graph());
  cl.check(ord.hub == 0, fmt::format("hub = {}", ord.hub + 1));
  return cl.exit_code();
}

int reproduce2(std::ostream& out) {
  Checklist cl(out);
  const SignedClusteredGraph g = fixtures::example1_graph();
  const TrustMatrix c = fixtures::example1_trust();
  for (double d2 : {5.0, 10.0, 100.0}) {
    const ScalarTableau t = scalar_recursion(c, std::vector<double>{2.0, d2, 0.0});
    const double d3 = t.stages[2](2, 2);
    cl.check(std::abs(d3 - 2.0) <= 1e-12, fmt::format("delta_1 = 2, delta_2 = {:g} gives delta_3 = {:.15g}", d2, d3));
  }
  const auto kernel_check = [&](const auto& deltas, Vector expected, const std::string& label) {
    const KernelReport r = verify_lemma1(build_M(g, deltas), g.partition());
    cl.check(r.is_psd && r.zero_multiplicity == 1 && parallel_to(r.kernel_basis.front(), expected, 1e-8),
             fmt::format("delta = ({}) is PSD with kernel along {}", fmt::join(deltas, ","), label));
  };
  kernel_check(fixtures::kExample2Deltas, {1, 1, 0, 0, 0, 0, -1}, "(1,1,0,0,0,0,-1)");
  kernel_check(fixtures::kExample2AltDeltas, {0, 0, 1, 1, 1, 1, -2}, "(0,0,1,1,1,1,-2)");

  const SymmetricMatrix m = build_M(g, fixtures::kExample2SimDeltas);
  const Vector x0 = gaussian_initial_state(g.agents(), fixtures::kExample2Seed);
  const Trajectory traj = simulate_linear_exact(m, x0, time_grid(0.01, 20.0));
  const ConsensusReport rep = detect_consensus(traj, g.partition());
  const Vector& cv = rep.cluster_values;
  fmt::print(out, "regime values: {:.6f}\n", fmt::join(cv, ", "));
  cl.check(rep.reached, "tripartite consensus reached by t = 20");
  cl.check(std::abs(cv[1]) <= 1e-6 && std::abs(cv[0] + cv[2]) <= 1e-6, "c_2 = 0 and c_1 = -c_3");
  return cl.exit_code();
}

int reproduce_complete(std::ostream& out, std::span<const std::size_t> sizes, std::uint64_t seed, bool tanh) {
  Checklist cl(out);
  const SignedClusteredGraph g = build_complete_unweighted(sizes);
  const GainVector gains = complete_graph_gains(sizes);
  fmt::print(out, "deltas: {:g}\n", fmt::join(gains.deltas, ", "));
  const SymmetricMatrix m = build_M(g, gains.deltas);
  const KernelReport r = verify_lemma1(m, g.partition());
  cl.check(r.is_psd, "M is positive semidefinite");
  cl.check(r.zero_multiplicity == sizes.size() - 1,
           fmt::format("zero eigenvalue multiplicity {} (expected {})", r.zero_multiplicity, sizes.size() - 1));
  cl.check(r.block_constant, "kernel is block-constant");

  const Vector x0 = gaussian_initial_state(g.agents(), seed);
  if (!tanh) {
    const Trajectory traj = simulate_linear_exact(m, x0, time_grid(1e-3, 10.0));
    const ConsensusReport rep = detect_consensus(traj, g.partition());
    cl.check(rep.reached && *rep.convergence_time < 2.0,
             fmt::format("consensus reached, convergence time {:.3f}", rep.convergence_time.value_or(NAN)));
    return cl.exit_code();
  }
  const NonlinearProfile profile = NonlinearProfile::uniform(sizes.size(), ScalarMap::Tanh);
  const Trajectory traj = simulate_rk4(nonlinear_field(m, profile, g.partition()), x0, 1e-3, 10.0, 10);
  const ConsensusReport rep = detect_consensus(traj, g.partition(), 1e-4);
  cl.check(rep.reached, fmt::format("block-constant within 1e-4 by t = 10 (spread {:.2e})",
                                    rep.max_intra_cluster_spread));
  const Equilibrium eq = lyapunov_reference(m, profile, g.partition(), rep.cluster_values);
  double worst = -INFINITY;
  for (std::size_t s = 1; s < traj.states.size(); ++s)
    worst = std::max(worst, lyapunov_V(traj.states[s], eq.x_star, profile, g.partition()) -
                                lyapunov_V(traj.states[s - 1], eq.x_star, profile, g.partition()));
  cl.check(worst <= 1e-9, fmt::format("Lyapunov function non-increasing (max step {:.2e})", worst));
  return cl.exit_code();
}

int cmd_reproduce(const Options& o, std::ostream& out) {
  switch (o.example) {
    case 1: return reproduce1(out);
    case 2: return reproduce2(out);
    case 3: return reproduce_complete(out, fixtures::kExample3Sizes, fixtures::kExample3Seed, false);
    case 4: return reproduce_complete(out, fixtures::kExample4Sizes, fixtures::kExample4Seed, true);
  }
  throw InvalidArgument(fmt::format("unknown example {}", o.example));
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Signed clustered graphs: validation, gain synthesis, verification and simulation"};
  app.require_subcommand(1);

  auto* validate = app.add_subcommand("validate", "Check symmetry, sign pattern and connectivity");
  validate->add_option("--graph", o.graph, "Graph JSON file")->required();

  auto* analyze = app.add_subcommand("analyze", "Print homogeneity constants and the cluster ordering");
  analyze->add_option("--graph", o.graph, "Graph JSON file")->required();

  auto* synth = app.add_subcommand("synthesize", "Compute stubbornness gains");
  synth->add_option("--graph", o.graph, "Graph JSON file")->required();
  synth->add_option("--q0", o.q0, "Initial margin")->check(CLI::PositiveNumber);
  synth->add_flag("--complete", o.complete, "Closed form for complete unweighted graphs");
  synth->add_option("--out", o.out, "Write gains as JSON");

  auto* verify = app.add_subcommand("verify", "Check the spectral consensus conditions for given gains");
  verify->add_option("--graph", o.graph, "Graph JSON file")->required();
  verify->add_option("--deltas", o.deltas, "Gains d1,...,dk")->required()->delimiter(',');

  auto* sim = app.add_subcommand("simulate", "Integrate the dynamics and detect consensus");
  sim->add_option("--graph", o.graph, "Graph JSON file")->required();
  sim->add_option("--deltas", o.deltas, "Gains d1,...,dk")->required()->delimiter(',');
  auto* seed = sim->add_option("--seed", o.seed, "Seed for Gaussian initial state");
  sim->add_option("--x0", o.x0, "Initial state JSON file")->excludes(seed);
  sim->add_option("--dt", o.dt, "Step")->check(CLI::PositiveNumber);
  sim->add_option("--t-end", o.t_end, "Final time")->check(CLI::NonNegativeNumber);
  sim->add_option("--tol", o.tol, "Consensus tolerance")->check(CLI::PositiveNumber);
  sim->add_option("--method", o.method, "exact or rk4")->check(CLI::IsMember({"exact", "rk4"}));
  sim->add_option("--profile", o.profile, "f1,...,fk from identity, tanh, cubic, shifted-arctan");
  sim->add_option("--stride", o.stride, "Record every n-th step")->check(CLI::PositiveNumber);
  sim->add_option("--out", o.out, "Trajectory CSV");

  auto* repro = app.add_subcommand("reproduce", "Run a bundled example with pinned inputs");
  repro->add_option("example", o.example, "1, 2, 3 or 4")->required()->check(CLI::Range(1, 4));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return kExitOk;
    }
    fmt::print(err, "error: {}\n", e.what());
    return kExitIo;
  }

  try {
    if (*validate) return cmd_validate(o, out);
    if (*analyze) return cmd_analyze(o, out);
    if (*synth) return cmd_synthesize(o, out);
    if (*verify) return cmd_verify(o, out);
    if (*sim) return cmd_simulate(o, out);
    if (*repro) return cmd_reproduce(o, out);
  } catch (const FormatError& e) {
    fmt::print(err, "error: {}\n", e.what());
    return kExitIo;
  } catch (const AssumptionViolation& e) {
    fmt::print(err, "assumption violated: {}\n", e.what());
    return kExitAssumption;
  } catch (const SynthesisError& e) {
    fmt::print(err, "synthesis failed: {}\n", e.what());
    return kExitSynthesis;
  } catch (const InvalidArgument& e) {
    fmt::print(err, "error: {}\n", e.what());
    return kExitIo;
  } catch (const Error& e) {
    fmt::print(err, "error: {}\n", e.what());
    return kExitAssumption;
  }
  return kExitIo;
}

}  // namespace kpartite
