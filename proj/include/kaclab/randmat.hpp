#pragma once

// Singular-value experiments on D and D_inf, the scaling quantile phi_n,
// and Monte Carlo oracles for the matrix and anti-concentration lemmas.

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"
#include "kaclab/son.hpp"
#include "kaclab/stats.hpp"

namespace kaclab {

/// |eigenvalues| of a symmetric matrix, ascending. Throws DomainError if
/// the input is not symmetric within 1e-12 (relative to its size).
Vector singular_values(const Matrix& m);

/// Verdict of one inequality oracle. A trial is a violation when its value
/// exceeds its bound by more than 1e-10; worst_slack = min(bound - value).
struct InequalityReport {
  std::string lemma;
  std::int64_t trials = 0;
  std::int64_t violations = 0;
  double worst_slack = 0.0;
  nlohmann::json params = nlohmann::json::object();

  bool passed() const { return violations == 0; }
};

nlohmann::json to_json(const InequalityReport& r);

enum class JacobianFlavor { D, DInfinity };
const char* to_string(JacobianFlavor f);
JacobianFlavor parse_jacobian_flavor(const std::string& s);

/// log10 of N^{-N} (4 N^21)^{-4(N+1)}; the value itself underflows a double
/// already at N = 6.
double sigma_floor_log10(int plane_total);

/// One D sample: a lazy schedule over fresh uniform updates from X = I.
Matrix sample_d_matrix(int n, double Q, Rng& rng);

struct PhiResult {
  JacobianFlavor flavor = JacobianFlavor::DInfinity;
  int n = 0;
  double Q = 1.0;
  QuantileEstimate uncapped;   ///< empirical (1/sqrt n)-quantile of sigma_1
  double cap = 0.0;            ///< (2n)^{-30}
  double capped = 0.0;         ///< min(cap, uncapped.point)
  double min_sigma1 = 0.0;
  double floor_log10 = 0.0;
  std::int64_t below_floor = 0;
  std::vector<double> sigma1;  ///< per sample, in replicate order
};

/// Sample r uses stream (seed, "phi", r).
PhiResult phi_estimate(int n, double Q, JacobianFlavor flavor, std::int64_t samples, std::uint64_t seed,
                       int threads = 0);

/// P[|alpha X^2 + beta X - x| < eps] for X ~ U[0, 1] against 4 C sqrt(eps) / sqrt|alpha|.
/// The trial value is the Monte Carlo estimate minus three standard errors.
InequalityReport small_ball_oracle(double alpha, double beta, double C, double eps, double x,
                                   std::int64_t samples, std::uint64_t seed);

/// Random configurations: alpha, beta, x and eps drawn per trial, plus the grid
/// alpha in {0.5, 1, 2}, beta in {-1, 0, 1}, eps in {1e-4, 1e-2} at x = 0.
InequalityReport small_ball_sweep(std::int64_t trials, std::int64_t samples_per_trial, std::uint64_t seed,
                                  int threads = 0);

/// ||prod Q - prod P||_HS against sum_i ||Q_1..Q_{i-1}||_op ||Q_i - P_i||_HS ||P_{i+1}..P_k||_op.
double telescoping_gap(const std::vector<Matrix>& p, const std::vector<Matrix>& q);
/// Ensembles cycle over i.i.d. uniform entries, independent Haar draws, and
/// small perturbations of Haar draws; k in [1, max_k], n in [2, max_n].
InequalityReport telescoping_oracle(std::int64_t trials, int max_k, int max_n, std::uint64_t seed,
                                    int threads = 0);

/// |det M2 / det M1 - 1| against N^{N/2} delta^N ("as stated") or against
/// (1 + delta)^N - 1 ("corrected"), for symmetric M1 and
/// ||M1 - M2||_op <= delta sigma_1(M1).
InequalityReport determinant_ratio_oracle(int N, double delta, std::int64_t trials, std::uint64_t seed,
                                          bool corrected = false, int threads = 0);

/// Products f(x) = prod_{k=1}^{m} R_k exp((theta_k + x_k) a_k) with unit
/// Hilbert-Schmidt generators a_k, written left to right.
struct ProductMap {
  std::vector<Matrix> R;
  std::vector<double> theta;
  std::vector<Matrix> a;

  int dim() const { return static_cast<int>(a.size()); }
  int n() const { return static_cast<int>(a.front().rows()); }
  Matrix eval(const Vector& x) const;
  Matrix derivative(const Vector& x, const Vector& h) const;
};

/// Haar R_k, uniform theta_k, generators a_{i} for uniform planes i; m = N.
ProductMap random_product_map(int n, Rng& rng);

/// ||f(x) - f(0) exp(f(0)^{-1} df_0(x))||_HS against 8 N^2 c^2, for x uniform
/// in [-c, c]^N. The squared-norm reading is counted in params.
InequalityReport exp_approx_oracle(const std::vector<int>& dims, double c, std::int64_t trials,
                                   std::uint64_t seed, int threads = 0);

/// ||df_x(h) - df_y(h)||_HS against 4 N^2 c, and
/// ||f(y) f(x)^{-1} df_x(h) - df_y(h)||_HS against 8 N^2 c (counted in params),
/// for x, y uniform in the box and unit h.
InequalityReport tangent_closeness_oracle(const std::vector<int>& dims, double c, std::int64_t trials,
                                          std::uint64_t seed, int threads = 0);

/// Probes P[1 - X_H <= n^-20] and P[||v+||^2 <= n^-5] for H = span(v_1..v_k);
/// violation when an estimate exceeds n^-2 plus three standard errors.
InequalityReport sphere_conditional_density_probe(int n, int k, std::int64_t samples, std::uint64_t seed);

struct DriftRow {
  double Q = 0.0;
  double ks_first_pair = 0.0;  ///< entry (1, 2)
  double ks_last_pair = 0.0;   ///< entry (1, N)
};

struct DriftTable {
  int n = 0;
  std::int64_t samples = 0;
  std::vector<DriftRow> rows;
  double control_ks = 0.0;     ///< D_inf against an independent D_inf sample, entry (1, 2)
  double control_critical95 = 0.0;
};

DriftTable d_vs_dinfinity_drift(int n, const std::vector<double>& Q_grid, std::int64_t samples,
                                std::uint64_t seed, int threads = 0);

/// Names accepted by run_lemma, in suite order.
const std::vector<std::string>& lemma_names();

/// Runs one oracle over its documented sweep with `trials` trials per
/// configuration. Sweeps:
///   telescoping                  k <= 5, n <= 6
///   determinant_ratio(_corrected) N in {2, 3, 4, 6}, delta in {0.1, 0.5}
///   exp_approx                   n in {3, 4}, c = 1e-3
///   tangent_closeness            n in {3, 4}, c = 1e-4
///   small_ball                   18 grid configs plus `trials` random configs
///   sphere_density               n = 10, k in {0, 4, 8}, max(trials, 1e4) samples
InequalityReport run_lemma(const std::string& name, std::int64_t trials, std::uint64_t seed, int threads = 0);

/// Sums trials and violations and keeps the smallest slack; component
/// reports are listed under params["components"].
InequalityReport merge_reports(const std::string& lemma, const std::vector<InequalityReport>& parts);

}  // namespace kaclab
