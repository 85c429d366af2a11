#pragma once

// Statistical post-processing: KS distances, quantiles with exact binomial
// confidence bounds, contraction fits, schedule-time statistics, the
// total-variation proxy, and mixing-time bound arithmetic.

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "kaclab/coupling.hpp"

namespace kaclab {

/// sup_x |F_n(x) - F(x)| against a reference CDF.
double ks_statistic(std::vector<double> samples, const std::function<double(double)>& cdf);

/// Two-sample KS distance sup_x |F_a(x) - F_b(x)|.
double ks_two_sample(std::vector<double> a, std::vector<double> b);

/// Asymptotic 95% critical value 1.358 sqrt((n + m) / (n m)).
double ks_two_sample_critical95(std::size_t n, std::size_t m);

struct QuantileEstimate {
  double level = 0.5;
  double point = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  double confidence = 0.95;
  std::int64_t samples = 0;
  std::uint64_t seed = 0;
};

/// Empirical level-quantile (the ceil(level * n)-th order statistic) with
/// distribution-free bounds from exact binomial order statistics. Throws
/// DomainError if the sample is too small for the two-sided interval.
QuantileEstimate quantile_estimate(std::vector<double> samples, double level,
                                   double confidence = 0.95);

struct ContractionFit {
  double slope = 0.0;      ///< d log(distance) / dt
  double intercept = 0.0;
  double r2 = 0.0;
  std::int64_t points = 0;
};

/// Least squares of log d_t on t over the prefix of strictly positive
/// distances. A perfectly flat trace has slope 0 and R^2 = 1.
ContractionFit contraction_fit(const std::vector<double>& distances);
inline ContractionFit contraction_fit(const CouplingTrace& trace) {
  return contraction_fit(trace.dist_main);
}

struct CdfPoint {
  double c;
  double empirical;
  double reference;
};

struct ScheduleTimeStats {
  ScheduleFlavor flavor = ScheduleFlavor::Greedy;
  int plane_total = 0;
  int gap = 0;
  std::int64_t trials = 0;
  double mean = 0.0;
  double variance = 0.0;
  double std_error = 0.0;
  std::vector<int> last_times;  ///< s_N per trial
  std::vector<int> waits;       ///< lazy only: the N waits beyond the forced gaps, pooled
  std::vector<CdfPoint> gumbel; ///< greedy only: P[(s_N - N ln N)/N <= c] vs exp(-exp(-c))
};

/// Simulates the schedule over fresh uniform plane sequences. Trial r uses
/// stream (seed, "schedule", r).
ScheduleTimeStats schedule_time_stats(ScheduleFlavor flavor, int n, double Q, std::int64_t trials,
                                      std::uint64_t seed, int threads = 0);

/// Greedy statistics over an abstract alphabet of plane_total symbols, so
/// that alphabet sizes that are not of the form n(n-1)/2 can be studied.
ScheduleTimeStats greedy_time_stats_planes(int plane_total, std::int64_t trials, std::uint64_t seed,
                                           int threads = 0);

inline const std::vector<double>& gumbel_grid() {
  static const std::vector<double> grid{-2.0, -1.0, 0.0, 1.0, 2.0, 3.0};
  return grid;
}

/// N H_N - 1.
double greedy_mean_oracle(int plane_total);

struct ChiSquareResult {
  double statistic = 0.0;
  int dof = 0;
  double p_value = 0.0;
  int bins = 0;
};

/// Goodness of fit of non-negative integers to Geometric(p) on {0, 1, ...},
/// with bins merged until every expected count is at least 5.
ChiSquareResult chi_square_geometric(const std::vector<int>& samples, double p);

struct TvProxy {
  double ks = 0.0;
  bool rank_deficient = false;
  std::vector<double> entries;  ///< X[1,1] per replicate
};

/// Runs independent walks from I for T steps and compares the X[1,1] sample
/// with the Haar marginal. Replicate r uses stream (seed, "tv_proxy", r).
TvProxy tv_proxy(int n, std::int64_t horizon, std::int64_t replicates, std::uint64_t seed,
                 int threads = 0);

struct MixingBoundReport {
  int n = 0;
  double phi = 0.0;
  std::int64_t lower_bound_steps = 0;  ///< N
  double headline_upper_steps = 0.0;      ///< 1e7 n^4 ln n
  double C = 1000.0;
  double phi_based_upper = 0.0;        ///< C n^2 ln(n / phi)
  std::string log_convention = "ln(n/phi)";
  double Q = 1.0;
  double intermediate_upper = 0.0;     ///< 8 Q n^4 ln n + 5 n^2 ln n + 900 n^2 ln(1/phi)
  std::vector<std::string> notes;
};

MixingBoundReport mixing_bound_report(int n, double phi, double C = 1000.0, double Q = 1.0);

}  // namespace kaclab
