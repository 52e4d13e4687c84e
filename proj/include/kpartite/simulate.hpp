#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "kpartite/graph.hpp"
#include "kpartite/linalg.hpp"

namespace kpartite {

inline constexpr double kDefaultDt = 1e-3;
inline constexpr double kDefaultTEnd = 10.0;
inline constexpr double kConsensusTol = 1e-6;
inline constexpr double kConsensusWindow = 1.0;
inline constexpr double kDivergenceLimit = 1e12;

enum class ScalarMap { Identity, Tanh, Cubic, ShiftedArctan };

/// "identity", "tanh", "cubic", "shifted-arctan". Throws InvalidArgument.
ScalarMap parse_scalar_map(std::string_view name);
std::string_view to_string(ScalarMap map) noexcept;

double apply(ScalarMap map, double z) noexcept;
/// H with H' = h and H(0) = 0.
double antiderivative(ScalarMap map, double z) noexcept;
/// h^{-1}(y), or nullopt when y is outside the range of h.
std::optional<double> inverse(ScalarMap map, double y) noexcept;

class NonlinearProfile {
 public:
  explicit NonlinearProfile(std::vector<ScalarMap> per_cluster);
  static NonlinearProfile uniform(std::size_t clusters, ScalarMap map);

  std::size_t clusters() const noexcept { return maps_.size(); }
  ScalarMap operator[](std::size_t cluster) const { return maps_.at(cluster); }
  const std::vector<ScalarMap>& maps() const noexcept { return maps_; }

  /// Entrywise h, cluster by cluster.
  Vector apply(const ClusterPartition& partition, std::span<const double> x) const;

 private:
  std::vector<ScalarMap> maps_;
};

/// Comma-separated list of k names, or a single name applied to every cluster.
NonlinearProfile parse_profile(std::string_view text, std::size_t clusters);

struct Trajectory {
  enum class Method { Exact, Rk4 };
  Vector times;
  std::vector<Vector> states;
  Method method = Method::Exact;
};

using Field = std::function<void(std::span<const double> x, std::span<double> dx)>;

/// x(t) = V exp(-Lambda t) V^T x0 at each requested (strictly increasing) time.
Trajectory simulate_linear_exact(const SymmetricMatrix& m, std::span<const double> x0,
                                 std::span<const double> times);

/// Fixed-step RK4 from t = 0 to t_end. Records every `stride`-th step and the
/// final one. Throws DivergenceError when ||x||_inf exceeds kDivergenceLimit.
Trajectory simulate_rk4(const Field& field, std::span<const double> x0, double dt, double t_end,
                        std::size_t stride = 1);

/// Uniform grid 0, dt*stride, ... ending exactly at t_end.
Vector time_grid(double dt, double t_end, std::size_t stride = 1);

Field linear_field(const SymmetricMatrix& m);
/// f(x) = -M h(x).
Field nonlinear_field(const SymmetricMatrix& m, const NonlinearProfile& profile,
                      const ClusterPartition& partition);

/// h(0) == 0, strictly increasing on a uniform grid over [-range, range], and
/// |h(z) - h(b)| bounded away from zero far from every grid point b.
bool class_R_check(const std::function<double(double)>& h, double range = 10.0, int samples = 2001);

struct ConsensusReport {
  bool reached = false;
  std::optional<double> convergence_time;
  Vector cluster_values;
  double max_intra_cluster_spread = 0.0;  // worst spread over the final window
  std::optional<double> predicted_match;
};

/// Throws InvalidArgument when the trajectory is empty or shorter than window.
ConsensusReport detect_consensus(const Trajectory& traj, const ClusterPartition& partition,
                                 double tol = kConsensusTol, double window = kConsensusWindow);

/// sum_j int_{x*_j}^{x_j} (h(z) - h(x*_j)) dz with closed-form antiderivatives.
double lyapunov_V(std::span<const double> x, std::span<const double> x_star,
                  const NonlinearProfile& profile, const ClusterPartition& partition);

/// Same with a single arbitrary h, by adaptive Simpson quadrature.
double lyapunov_V(std::span<const double> x, std::span<const double> x_star,
                  const std::function<double(double)>& h, double tol = 1e-10);

double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double tol);

struct Equilibrium {
  Vector x_star;
  bool in_range = true;  // false when some h^{-1} had no preimage (clamped to the final mean)
};

/// Lifts the final cluster means, projects h of them onto ker M, and inverts h.
Equilibrium lyapunov_reference(const SymmetricMatrix& m, const NonlinearProfile& profile,
                               const ClusterPartition& partition, std::span<const double> cluster_values);

/// N(0, stddev^2) entries from a mt19937_64 seeded with `seed`.
Vector gaussian_initial_state(std::size_t n, std::uint64_t seed, double stddev = 2.0);

std::string trajectory_csv(const Trajectory& traj);
void write_trajectory_csv(const Trajectory& traj, const std::filesystem::path& path);

}  // namespace kpartite
