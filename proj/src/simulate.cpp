#include "kpartite/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <random>

#include <fmt/format.h>

#include "kpartite/error.hpp"
#include "kpartite/kernels.hpp"
#include "kpartite/verification.hpp"

namespace kpartite {

namespace {

constexpr double kQuarterPi = std::numbers::pi / 4.0;

// log cosh z without overflow.
double log_cosh(double z) {
  const double a = std::abs(z);
  return a + std::log1p(std::exp(-2.0 * a)) - std::numbers::ln2;
}

double simpson_step(const std::function<double(double)>& f, double a, double b, double fa, double fm,
                    double fb, double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
  return simpson_step(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) +
         simpson_step(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1);
}

void check_state(std::span<const double> x, double t) {
  for (double v : x)
    if (!std::isfinite(v) || std::abs(v) > kDivergenceLimit)
      throw DivergenceError(fmt::format("state diverged at t = {:.6g} (|x| > {:.0e})", t, kDivergenceLimit));
}

}  // namespace

ScalarMap parse_scalar_map(std::string_view name) {
  if (name == "identity") return ScalarMap::Identity;
  if (name == "tanh") return ScalarMap::Tanh;
  if (name == "cubic") return ScalarMap::Cubic;
  if (name == "shifted-arctan") return ScalarMap::ShiftedArctan;
  throw InvalidArgument(
      fmt::format("unknown function '{}' (expected identity, tanh, cubic or shifted-arctan)", name));
}

std::string_view to_string(ScalarMap map) noexcept {
  switch (map) {
    case ScalarMap::Identity: return "identity";
    case ScalarMap::Tanh: return "tanh";
    case ScalarMap::Cubic: return "cubic";
    case ScalarMap::ShiftedArctan: return "shifted-arctan";
  }
  return "?";
}

double apply(ScalarMap map, double z) noexcept {
  switch (map) {
    case ScalarMap::Identity: return z;
    case ScalarMap::Tanh: return std::tanh(z);
    case ScalarMap::Cubic: return z * z * z;
    case ScalarMap::ShiftedArctan: return std::atan(z + 1.0) - kQuarterPi;
  }
  return z;
}

double antiderivative(ScalarMap map, double z) noexcept {
  switch (map) {
    case ScalarMap::Identity: return 0.5 * z * z;
    case ScalarMap::Tanh: return log_cosh(z);
    case ScalarMap::Cubic: return 0.25 * z * z * z * z;
    case ScalarMap::ShiftedArctan: {
      const double u = z + 1.0;
      // H(0) = atan(1) - log(2)/2
      return u * std::atan(u) - 0.5 * std::log1p(u * u) - kQuarterPi * z -
             (kQuarterPi - 0.5 * std::numbers::ln2);
    }
  }
  return 0.0;
}

std::optional<double> inverse(ScalarMap map, double y) noexcept {
  switch (map) {
    case ScalarMap::Identity: return y;
    case ScalarMap::Tanh:
      if (std::abs(y) >= 1.0) return std::nullopt;
      return std::atanh(y);
    case ScalarMap::Cubic: return std::cbrt(y);
    case ScalarMap::ShiftedArctan: {
      const double w = y + kQuarterPi;
      if (std::abs(w) >= std::numbers::pi / 2.0) return std::nullopt;
      return std::tan(w) - 1.0;
    }
  }
  return std::nullopt;
}

NonlinearProfile::NonlinearProfile(std::vector<ScalarMap> per_cluster) : maps_(std::move(per_cluster)) {
  if (maps_.empty()) throw InvalidArgument("nonlinear profile needs at least one cluster");
}

NonlinearProfile NonlinearProfile::uniform(std::size_t clusters, ScalarMap map) {
  return NonlinearProfile(std::vector<ScalarMap>(clusters, map));
}

Vector NonlinearProfile::apply(const ClusterPartition& partition, std::span<const double> x) const {
  if (partition.clusters() != maps_.size())
    throw InvalidArgument(fmt::format("profile has {} functions for {} clusters", maps_.size(),
                                      partition.clusters()));
  Vector out(x.size());
  for (std::size_t c = 0; c < partition.clusters(); ++c)
    for (std::size_t t = 0; t < partition.size(c); ++t) {
      const std::size_t i = partition.offset(c) + t;
      out[i] = kpartite::apply(maps_[c], x[i]);
    }
  return out;
}

NonlinearProfile parse_profile(std::string_view text, std::size_t clusters) {
  std::vector<ScalarMap> maps;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = text.find(',', start);
    maps.push_back(parse_scalar_map(text.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  if (maps.size() == 1) return NonlinearProfile::uniform(clusters, maps.front());
  if (maps.size() != clusters)
    throw InvalidArgument(fmt::format("profile lists {} functions for {} clusters", maps.size(), clusters));
  return NonlinearProfile(std::move(maps));
}

Trajectory simulate_linear_exact(const SymmetricMatrix& m, std::span<const double> x0,
                                 std::span<const double> times) {
  if (x0.size() != m.size()) throw InvalidArgument("simulate_linear_exact: length mismatch");
  for (std::size_t i = 1; i < times.size(); ++i)
    if (!(times[i] > times[i - 1])) throw InvalidArgument("simulate_linear_exact: times must increase");
  const EigenDecomposition eig = sym_eigen(m);
  // coefficients of x0 in the eigenbasis: V^T x0
  Vector coeffs(m.size(), 0.0);
  for (std::size_t r = 0; r < m.size(); ++r)
    for (std::size_t c = 0; c < m.size(); ++c) coeffs[c] += eig.vectors(r, c) * x0[r];

  Trajectory out;
  out.method = Trajectory::Method::Exact;
  out.times.assign(times.begin(), times.end());
  out.states.assign(times.size(), Vector(m.size()));
  kernels::spectral_propagate(eig.vectors, eig.values, coeffs, times, out.states);
  for (std::size_t i = 0; i < out.states.size(); ++i) check_state(out.states[i], out.times[i]);
  return out;
}

Vector time_grid(double dt, double t_end, std::size_t stride) {
  if (!(dt > 0.0) || !(t_end >= 0.0) || stride == 0)
    throw InvalidArgument(fmt::format("invalid grid dt = {}, t_end = {}, stride = {}", dt, t_end, stride));
  const auto steps = static_cast<std::size_t>(std::llround(std::ceil(t_end / dt - 1e-9)));
  Vector t;
  for (std::size_t s = 0; s < steps; s += stride) t.push_back(static_cast<double>(s) * dt);
  t.push_back(t_end);
  if (t.size() >= 2 && t[t.size() - 2] >= t_end) t.erase(t.end() - 2);
  return t;
}

Trajectory simulate_rk4(const Field& field, std::span<const double> x0, double dt, double t_end,
                        std::size_t stride) {
  if (!(dt > 0.0) || !(t_end >= 0.0)) throw InvalidArgument("simulate_rk4 needs dt > 0 and t_end >= 0");
  if (stride == 0) throw InvalidArgument("simulate_rk4: stride must be positive");
  const std::size_t n = x0.size();
  const auto steps = static_cast<std::size_t>(std::llround(std::ceil(t_end / dt - 1e-9)));

  Trajectory out;
  out.method = Trajectory::Method::Rk4;
  Vector x(x0.begin(), x0.end());
  check_state(x, 0.0);
  out.times.push_back(0.0);
  out.states.push_back(x);

  Vector k1(n), k2(n), k3(n), k4(n), tmp(n);
  double t = 0.0;
  for (std::size_t s = 1; s <= steps; ++s) {
    // last step is shortened so the trajectory ends exactly at t_end
    const double t_next = s == steps ? t_end : static_cast<double>(s) * dt;
    const double h = t_next - t;
    field(x, k1);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = x[i] + 0.5 * h * k1[i];
    field(tmp, k2);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = x[i] + 0.5 * h * k2[i];
    field(tmp, k3);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = x[i] + h * k3[i];
    field(tmp, k4);
    for (std::size_t i = 0; i < n; ++i) x[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    t = t_next;
    check_state(x, t);
    if (s % stride == 0 || s == steps) {
      out.times.push_back(t);
      out.states.push_back(x);
    }
  }
  return out;
}

Field linear_field(const SymmetricMatrix& m) {
  return [mat = m.matrix()](std::span<const double> x, std::span<double> dx) {
    kernels::gemv(mat, x, dx);
    for (double& v : dx) v = -v;
  };
}

Field nonlinear_field(const SymmetricMatrix& m, const NonlinearProfile& profile,
                      const ClusterPartition& partition) {
  if (m.size() != partition.agents()) throw InvalidArgument("nonlinear_field: size mismatch");
  if (profile.clusters() != partition.clusters()) throw InvalidArgument("nonlinear_field: profile mismatch");
  return [mat = m.matrix(), profile, partition](std::span<const double> x, std::span<double> dx) {
    const Vector hx = profile.apply(partition, x);
    kernels::gemv(mat, hx, dx);
    for (double& v : dx) v = -v;
  };
}

bool class_R_check(const std::function<double(double)>& h, double range, int samples) {
  if (samples < 2) throw InvalidArgument("class_R_check needs at least 2 samples");
  if (h(0.0) != 0.0) return false;
  const double step = 2.0 * range / (samples - 1);
  double prev = h(-range);
  for (int i = 1; i < samples; ++i) {
    const double cur = h(-range + i * step);
    if (!(cur > prev)) return false;
    prev = cur;
  }
  // Growth proxy: from every base point b, h keeps a strictly positive gap to
  // h(b) at distance 2 * range on both sides.
  for (int i = 0; i < samples; i += std::max(1, samples / 50)) {
    const double b = -range + i * step;
    if (!(h(b + 2.0 * range) > h(b)) || !(h(b) > h(b - 2.0 * range))) return false;
  }
  return true;
}

ConsensusReport detect_consensus(const Trajectory& traj, const ClusterPartition& partition, double tol,
                                 double window) {
  if (traj.times.empty()) throw InvalidArgument("detect_consensus: empty trajectory");
  const double t_end = traj.times.back();
  if (window < 0.0 || window > t_end - traj.times.front())
    throw InvalidArgument(fmt::format("consensus window {} exceeds trajectory length {}", window,
                                      t_end - traj.times.front()));

  ConsensusReport r;
  r.cluster_values = cluster_means(partition, traj.states.back());
  const std::size_t count = traj.times.size();
  std::vector<double> spread(count, 0.0);
  std::vector<char> ok(count, 0);
  for (std::size_t m = 0; m < count; ++m) {
    const Vector& x = traj.states[m];
    const Vector means = cluster_means(partition, x);
    double drift = 0.0;
    for (std::size_t c = 0; c < partition.clusters(); ++c) {
      const auto first = x.begin() + static_cast<std::ptrdiff_t>(partition.offset(c));
      const auto [lo, hi] = std::minmax_element(first, first + static_cast<std::ptrdiff_t>(partition.size(c)));
      spread[m] = std::max(spread[m], *hi - *lo);
      drift = std::max(drift, std::abs(means[c] - r.cluster_values[c]));
    }
    ok[m] = spread[m] <= tol && drift <= tol;
  }

  r.reached = true;
  for (std::size_t m = 0; m < count; ++m) {
    if (traj.times[m] < t_end - window) continue;
    r.max_intra_cluster_spread = std::max(r.max_intra_cluster_spread, spread[m]);
    if (!ok[m]) r.reached = false;
  }
  if (r.reached) {
    std::size_t first = count - 1;
    while (first > 0 && ok[first - 1]) --first;
    r.convergence_time = traj.times[first];
  }
  return r;
}

double lyapunov_V(std::span<const double> x, std::span<const double> x_star, const NonlinearProfile& profile,
                  const ClusterPartition& partition) {
  if (x.size() != partition.agents() || x_star.size() != partition.agents())
    throw InvalidArgument("lyapunov_V: length mismatch");
  double v = 0.0;
  for (std::size_t c = 0; c < partition.clusters(); ++c) {
    const ScalarMap h = profile[c];
    for (std::size_t t = 0; t < partition.size(c); ++t) {
      const std::size_t j = partition.offset(c) + t;
      v += antiderivative(h, x[j]) - antiderivative(h, x_star[j]) - apply(h, x_star[j]) * (x[j] - x_star[j]);
    }
  }
  return v;
}

double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double tol) {
  if (a == b) return 0.0;
  const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return simpson_step(f, a, b, fa, fm, fb, whole, tol, 50);
}

double lyapunov_V(std::span<const double> x, std::span<const double> x_star,
                  const std::function<double(double)>& h, double tol) {
  if (x.size() != x_star.size()) throw InvalidArgument("lyapunov_V: length mismatch");
  double v = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) {
    const double hs = h(x_star[j]);
    v += adaptive_simpson([&](double z) { return h(z) - hs; }, x_star[j], x[j], tol);
  }
  return v;
}

Equilibrium lyapunov_reference(const SymmetricMatrix& m, const NonlinearProfile& profile,
                               const ClusterPartition& partition, std::span<const double> cluster_values) {
  const Vector lifted = lift(partition, cluster_values);
  const Vector projected = predict_steady_state(m, profile.apply(partition, lifted));
  Equilibrium eq;
  eq.x_star.resize(lifted.size());
  for (std::size_t c = 0; c < partition.clusters(); ++c)
    for (std::size_t t = 0; t < partition.size(c); ++t) {
      const std::size_t j = partition.offset(c) + t;
      const auto pre = inverse(profile[c], projected[j]);
      if (!pre) eq.in_range = false;
      eq.x_star[j] = pre.value_or(lifted[j]);
    }
  return eq;
}

Vector gaussian_initial_state(std::size_t n, std::uint64_t seed, double stddev) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> dist(0.0, stddev);
  Vector x(n);
  for (double& v : x) v = dist(gen);
  return x;
}

std::string trajectory_csv(const Trajectory& traj) {
  std::string out = "t";
  const std::size_t n = traj.states.empty() ? 0 : traj.states.front().size();
  for (std::size_t i = 0; i < n; ++i) out += fmt::format(",x_{}", i);
  out += '\n';
  for (std::size_t m = 0; m < traj.times.size(); ++m) {
    out += fmt::format("{:.17g}", traj.times[m]);
    for (double v : traj.states[m]) out += fmt::format(",{:.17g}", v);
    out += '\n';
  }
  return out;
}

void write_trajectory_csv(const Trajectory& traj, const std::filesystem::path& path) {
  std::ofstream f(path);
  if (!f) throw FormatError(fmt::format("cannot open '{}' for writing", path.string()));
  f << trajectory_csv(traj);
  if (!f) throw FormatError(fmt::format("write to '{}' failed", path.string()));
}

}  // namespace kpartite
