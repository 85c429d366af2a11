#pragma once

// Couplings of two Kac walks: the locally contractive scaffold coupling,
// marked-time schedules, and the two-stage non-Markovian coupling whose
// final stage is a numerical maximal coupling of perturbation pushforwards.

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "kaclab/induced_map.hpp"
#include "kaclab/son.hpp"
#include "kaclab/walk.hpp"

namespace kaclab {

enum class ScheduleFlavor { Greedy, Lazy };

const char* to_string(ScheduleFlavor f);
ScheduleFlavor parse_flavor(const std::string& s);

struct Schedule {
  std::vector<int> marked;  ///< s_1 < ... < s_N, 0-based times
  int horizon = 0;          ///< T = s_N + 1
  ScheduleFlavor flavor = ScheduleFlavor::Greedy;
  double Q = 0.0;           ///< lazy gap constant; unused for greedy
};

/// Raised when a plane sequence ends before every marked time is realized.
class InsufficientCoverage : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// ceil(Q n^2 ln n).
int lazy_gap(int n, double Q);

/// Consumes planes one at a time and reports when the schedule is complete,
/// so callers can draw exactly as many updates as the schedule needs.
class ScheduleBuilder {
 public:
  ScheduleBuilder(int plane_total, ScheduleFlavor flavor, int gap = 0, double Q = 0.0);
  static ScheduleBuilder greedy(int plane_total);
  static ScheduleBuilder lazy(int n, double Q);

  /// Feeds the plane used at the next time step; returns true once complete.
  bool push(int plane);
  bool done() const { return static_cast<int>(marked_.size()) == plane_total_; }
  std::int64_t time() const { return t_; }
  /// Throws InsufficientCoverage if the schedule is not complete.
  Schedule finish() const;

 private:
  int plane_total_;
  ScheduleFlavor flavor_;
  int gap_;
  double Q_;
  std::int64_t t_ = 0;
  std::vector<int> marked_;
  std::vector<char> seen_;
};

/// s_l = l-th first occurrence of a new plane; T = s_N + 1.
Schedule greedy_schedule(const std::vector<int>& planes, int n);
/// Same rule for an abstract alphabet of plane_total symbols.
Schedule greedy_schedule_planes(const std::vector<int>& planes, int plane_total);
/// s_1 = first t with i(t) = 1; s_{l+1} = first t >= s_l + gap with i(t) = l + 1.
Schedule lazy_schedule(const std::vector<int>& planes, int n, double Q);

/// Angle for the second chain: eta_y = eta_x + (1/sqrt 2) <P(X Y^T - I), a_i>
/// (mod 2pi), computed from rows k and l only. This is the sign that makes the
/// rotated chains approach each other.
double contractive_step(const Matrix& x, const Matrix& y, int plane, double eta_x);

struct CouplingTrace {
  std::vector<double> dist_main;      ///< ||X_t - Y_t||_HS, t = 0..T
  std::vector<double> dist_scaffold;  ///< ||Xhat_t - Yhat_t||_HS, t = 0..T
  bool coalesced = false;
  std::int64_t step = -1;             ///< first t with X_t = Y_t, or -1
};

struct ContractiveRun {
  CouplingTrace trace;
  std::vector<int> planes;
  std::vector<double> eta_x;
  std::vector<double> eta_y;
  Matrix x_final;
  Matrix y_final;
};

/// Default distance below which the scaffold chains are merged.
inline constexpr double kSnapDistance = 1e-12;

/// Runs both chains T steps with shared planes. Once the distance drops to
/// snap or below, Y is set equal to X and the pair stays merged.
ContractiveRun run_contractive_coupling(const Matrix& x0, const Matrix& y0, std::int64_t horizon,
                                        Rng& rng, double snap = kSnapDistance);

struct NMCoupling {
  InducedMapSpec spec_a;
  InducedMapSpec spec_b;
  Schedule schedule;
  CouplingTrace trace;  ///< scaffold distances; main distances equal them until realized
  Matrix x_hat;         ///< scaffold endpoints
  Matrix y_hat;
};

/// Draws updates until the schedule is complete, couples the scaffold chains
/// contractively (without merging), and packages both induced map specs.
NMCoupling build_nm_coupling(const Matrix& x0, const Matrix& y0, double Q, double eps,
                             ScheduleFlavor flavor, Rng& rng);

enum class InverseStatus { Converged, NotConverged, LeftBox, Singular };
const char* to_string(InverseStatus s);

struct InverseResult {
  Vector x;
  InverseStatus status = InverseStatus::NotConverged;
  int iterations = 0;
  double residual = 0.0;  ///< ||f(x) - target||_HS at the last iterate
  bool converged() const { return status == InverseStatus::Converged; }
};

struct InverseOptions {
  double tolerance = 1e-10;
  int max_iterations = 50;
  double box_inflation = 1.1;
  double singular_threshold = 1e-12;
};

/// Newton iteration on perturbation coordinates with residual
/// coordinates of P(f(x)^T target - I).
InverseResult invert_induced_map(const InducedMapSpec& spec, const Matrix& target, const Vector& x0,
                                 const InverseOptions& opt = {});

class CouplingNumericsExhausted : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct CoalesceOptions {
  int retry_budget = 100;
  std::int64_t max_proposals = 1000000;
  InverseOptions inverse;
};

struct CoalesceResult {
  Vector dx;
  Vector dy;
  bool coalesced = false;
  int solver_failures = 0;
  std::int64_t proposals = 0;
};

/// Maximal coupling of the laws of f_A(dx) and f_B(dy) for dx, dy uniform on
/// [-c, c]^m. Each marginal is exactly uniform. Only the preimage reached by
/// Newton from the matching point is used.
CoalesceResult coalesce_attempt(const InducedMapSpec& a, const InducedMapSpec& b, Rng& rng,
                                const CoalesceOptions& opt = {});

/// Fills trace.dist_main by running both perturbed walks, and marks the
/// trace coalesced at T when the attempt succeeded.
void realize_main_trace(const NMCoupling& c, const CoalesceResult& r, CouplingTrace& trace);

}  // namespace kaclab
