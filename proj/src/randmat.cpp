#include "kaclab/randmat.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "kaclab/coupling.hpp"
#include "kaclab/errors.hpp"
#include "kaclab/induced_map.hpp"
#include "kaclab/parallel.hpp"
#include "kaclab/walk.hpp"

namespace kaclab {

namespace {

constexpr double kViolationTol = 1e-10;

struct TrialValue {
  double value = 0.0;
  double bound = 0.0;
};

InequalityReport reduce(std::string lemma, const std::vector<TrialValue>& vals) {
  InequalityReport r;
  r.lemma = std::move(lemma);
  r.trials = static_cast<std::int64_t>(vals.size());
  r.worst_slack = std::numeric_limits<double>::infinity();
  for (const TrialValue& v : vals) {
    if (v.value > v.bound + kViolationTol) ++r.violations;
    r.worst_slack = std::min(r.worst_slack, v.bound - v.value);
  }
  if (vals.empty()) r.worst_slack = 0.0;
  return r;
}

Matrix random_uniform_matrix(int n, Rng& rng) {
  Matrix m(n, n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) m(i, j) = rng.uniform(-1.0, 1.0);
  return m;
}

Matrix random_symmetric_gaussian(int n, Rng& rng) {
  Matrix m(n, n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) m(i, j) = rng.normal();
  return 0.5 * (m + m.transpose());
}

double op_norm(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<Matrix> svd(m);
  return svd.singularValues()(0);
}

}  // namespace

Vector singular_values(const Matrix& m) {
  require(m.rows() == m.cols(), "singular_values: matrix must be square");
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  require((m - m.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * scale,
          "singular_values: matrix is not symmetric");
  Eigen::SelfAdjointEigenSolver<Matrix> es(m, Eigen::EigenvaluesOnly);
  Vector s = es.eigenvalues().cwiseAbs();
  std::sort(s.data(), s.data() + s.size());
  return s;
}

nlohmann::json to_json(const InequalityReport& r) {
  return nlohmann::json{{"lemma", r.lemma},
                        {"trials", r.trials},
                        {"violations", r.violations},
                        {"worst_slack", r.worst_slack},
                        {"passed", r.passed()},
                        {"params", r.params}};
}

const char* to_string(JacobianFlavor f) { return f == JacobianFlavor::D ? "d" : "dinf"; }

JacobianFlavor parse_jacobian_flavor(const std::string& s) {
  if (s == "d") return JacobianFlavor::D;
  if (s == "dinf") return JacobianFlavor::DInfinity;
  throw DomainError("unknown Jacobian flavor '" + s + "' (expected d or dinf)");
}

double sigma_floor_log10(int plane_total) {
  const double big_n = plane_total;
  return -big_n * std::log10(big_n) - 4.0 * (big_n + 1.0) * (std::log10(4.0) + 21.0 * std::log10(big_n));
}

Matrix sample_d_matrix(int n, double Q, Rng& rng) {
  ScheduleBuilder b = ScheduleBuilder::lazy(n, Q);
  InducedMapSpec spec;
  spec.base = Matrix::Identity(n, n);
  bool done = false;
  while (!done) {
    const Update u = random_update(n, rng);
    spec.planes.push_back(u.plane);
    spec.eta.push_back(u.theta);
    done = b.push(u.plane);
  }
  const Schedule s = b.finish();
  spec.horizon = s.horizon;
  spec.marked = s.marked;
  return d_matrix(spec);
}

PhiResult phi_estimate(int n, double Q, JacobianFlavor flavor, std::int64_t samples, std::uint64_t seed,
                       int threads) {
  require(n >= 2, "phi_estimate: n must be at least 2");
  require(samples >= 100, "phi_estimate: at least 100 samples required");
  PhiResult res;
  res.flavor = flavor;
  res.n = n;
  res.Q = Q;
  res.sigma1 = parallel_map(
      samples,
      [&](std::int64_t r) {
        Rng rng = make_stream(seed, "phi", static_cast<std::uint64_t>(r));
        const Matrix d = flavor == JacobianFlavor::D ? sample_d_matrix(n, Q, rng) : d_infinity(n, rng);
        return singular_values(d)(0);
      },
      threads);
  res.uncapped = quantile_estimate(res.sigma1, 1.0 / std::sqrt(static_cast<double>(n)));
  res.uncapped.seed = seed;
  res.cap = std::pow(2.0 * n, -30.0);
  res.capped = std::min(res.cap, res.uncapped.point);
  res.min_sigma1 = *std::min_element(res.sigma1.begin(), res.sigma1.end());
  res.floor_log10 = sigma_floor_log10(plane_count(n));
  for (double s : res.sigma1)
    if (!(s > 0.0) || std::log10(s) < res.floor_log10) ++res.below_floor;
  return res;
}

InequalityReport small_ball_oracle(double alpha, double beta, double C, double eps, double x,
                                   std::int64_t samples, std::uint64_t seed) {
  require(alpha != 0.0, "small_ball_oracle: alpha must be nonzero");
  require(eps > 0.0 && C > 0.0 && samples > 0, "small_ball_oracle: invalid parameters");
  Rng rng = make_stream(seed, "small_ball", 0);
  std::int64_t hits = 0;
  for (std::int64_t s = 0; s < samples; ++s) {
    const double u = rng.uniform();
    if (std::abs(alpha * u * u + beta * u - x) < eps) ++hits;
  }
  const double p = static_cast<double>(hits) / static_cast<double>(samples);
  const double se = std::sqrt(p * (1.0 - p) / static_cast<double>(samples));
  const double bound = 4.0 * C * std::sqrt(eps) / std::sqrt(std::abs(alpha));
  InequalityReport r = reduce("small_ball", {TrialValue{p - 3.0 * se, bound}});
  r.params = {{"alpha", alpha}, {"beta", beta}, {"C", C}, {"eps", eps}, {"x", x},
              {"samples", samples}, {"estimate", p}, {"std_error", se}, {"bound", bound}};
  return r;
}

InequalityReport small_ball_sweep(std::int64_t trials, std::int64_t samples_per_trial, std::uint64_t seed,
                                  int threads) {
  require(trials >= 0 && samples_per_trial > 0, "small_ball_sweep: invalid sizes");
  struct Config {
    double alpha, beta, eps, x;
  };
  std::vector<Config> configs;
  for (double a : {0.5, 1.0, 2.0})
    for (double b : {-1.0, 0.0, 1.0})
      for (double e : {1e-4, 1e-2}) configs.push_back({a, b, e, 0.0});
  const auto grid = static_cast<std::int64_t>(configs.size());
  auto vals = parallel_map(
      trials + grid,
      [&](std::int64_t r) {
        Config cfg;
        std::uint64_t sub = mix_seed(seed, tag_of("small_ball_sweep"), static_cast<std::uint64_t>(r));
        if (r < grid) {
          cfg = configs[static_cast<std::size_t>(r)];
        } else {
          Rng rng = make_stream(seed, "small_ball_config", static_cast<std::uint64_t>(r));
          const double mag = std::pow(10.0, rng.uniform(-1.0, 0.5));
          cfg.alpha = rng.uniform() < 0.5 ? -mag : mag;
          cfg.beta = rng.uniform(-2.0, 2.0);
          cfg.x = rng.uniform(-1.0, 2.0);
          cfg.eps = std::pow(10.0, rng.uniform(-4.0, -1.0));
        }
        const std::int64_t s = r < grid ? std::max<std::int64_t>(samples_per_trial, 100000) : samples_per_trial;
        const InequalityReport one = small_ball_oracle(cfg.alpha, cfg.beta, 1.0, cfg.eps, cfg.x, s, sub);
        return TrialValue{one.params["estimate"].get<double>() - 3.0 * one.params["std_error"].get<double>(),
                          one.params["bound"].get<double>()};
      },
      threads);
  InequalityReport r = reduce("small_ball", vals);
  r.params = {{"random_configs", trials}, {"grid_configs", grid}, {"samples_per_trial", samples_per_trial},
              {"grid_samples", std::max<std::int64_t>(samples_per_trial, 100000)}, {"C", 1.0},
              {"density", "uniform[0,1]"}, {"value", "estimate - 3 standard errors"}};
  return r;
}

double telescoping_gap(const std::vector<Matrix>& p, const std::vector<Matrix>& q) {
  require(!p.empty() && p.size() == q.size(), "telescoping_gap: sequences must have equal positive length");
  const std::size_t k = p.size();
  const Eigen::Index n = p.front().rows();
  Matrix prod_p = Matrix::Identity(n, n), prod_q = Matrix::Identity(n, n);
  for (std::size_t i = 0; i < k; ++i) {
    prod_p = prod_p * p[i];
    prod_q = prod_q * q[i];
  }
  const double lhs = (prod_q - prod_p).norm();
  // suffix[i] = P_{i+1} ... P_k (0-based: p[i+1..k-1])
  std::vector<Matrix> suffix(k + 1, Matrix::Identity(n, n));
  for (std::size_t i = k; i-- > 0;) suffix[i] = p[i] * suffix[i + 1];
  double rhs = 0.0;
  Matrix prefix = Matrix::Identity(n, n);
  for (std::size_t i = 0; i < k; ++i) {
    rhs += op_norm(prefix) * (q[i] - p[i]).norm() * op_norm(suffix[i + 1]);
    prefix = prefix * q[i];
  }
  return rhs - lhs;
}

InequalityReport telescoping_oracle(std::int64_t trials, int max_k, int max_n, std::uint64_t seed, int threads) {
  require(max_k >= 1 && max_n >= 2, "telescoping_oracle: invalid sizes");
  auto vals = parallel_map(
      trials,
      [&](std::int64_t r) {
        Rng rng = make_stream(seed, "telescoping", static_cast<std::uint64_t>(r));
        const int k = rng.uniform_int(1, max_k);
        const int n = rng.uniform_int(2, max_n);
        std::vector<Matrix> p, q;
        for (int i = 0; i < k; ++i) {
          switch (r % 3) {
            case 0:
              p.push_back(random_uniform_matrix(n, rng));
              q.push_back(random_uniform_matrix(n, rng));
              break;
            case 1:
              p.push_back(haar_sample(n, rng));
              q.push_back(haar_sample(n, rng));
              break;
            default:
              p.push_back(haar_sample(n, rng));
              q.push_back(p.back() + 1e-3 * random_uniform_matrix(n, rng));
              break;
          }
        }
        const double gap = telescoping_gap(p, q);
        return TrialValue{-gap, 0.0};
      },
      threads);
  InequalityReport r = reduce("telescoping", vals);
  r.params = {{"max_k", max_k}, {"max_n", max_n},
              {"ensembles", {"uniform[-1,1] entries", "independent Haar", "Haar plus 1e-3 uniform noise"}}};
  return r;
}

InequalityReport determinant_ratio_oracle(int N, double delta, std::int64_t trials, std::uint64_t seed,
                                          bool corrected, int threads) {
  require(N >= 1, "determinant_ratio_oracle: N must be positive");
  require(delta > 0.0 && delta < 1.0, "determinant_ratio_oracle: delta must lie in (0, 1)");
  const double stated = std::pow(static_cast<double>(N), 0.5 * N) * std::pow(delta, N);
  const double sharp = std::pow(1.0 + delta, N) - 1.0;
  const double bound = corrected ? sharp : stated;
  auto vals = parallel_map(
      trials,
      [&](std::int64_t r) {
        Rng rng = make_stream(seed, corrected ? "det_ratio_corrected" : "det_ratio", static_cast<std::uint64_t>(r));
        for (;;) {
          const Matrix q = haar_sample(std::max(N, 2), rng).topLeftCorner(N, N);
          Vector lambda(N);
          for (int i = 0; i < N; ++i)
            lambda(i) = (rng.uniform() < 0.5 ? -1.0 : 1.0) * std::pow(10.0, rng.uniform(-0.5, 0.5));
          const Matrix basis = N >= 2 ? q : Matrix::Identity(1, 1);
          const Matrix m1 = basis * lambda.asDiagonal() * basis.transpose();
          const Vector s1 = singular_values(m1);
          if (s1(0) < 1e-3 * s1(N - 1)) continue;  // too ill-conditioned
          Matrix e;
          switch (r % 3) {
            case 0:  // random direction, random size
              e = random_symmetric_gaussian(N, rng);
              e *= rng.uniform() * delta * s1(0) / op_norm(e);
              break;
            case 1:  // random direction on the boundary of the constraint
              e = random_symmetric_gaussian(N, rng);
              e *= delta * s1(0) / op_norm(e);
              break;
            default: {  // aligned with M1: every eigenvalue pushed outward
              Vector sg(N);
              for (int i = 0; i < N; ++i) sg(i) = lambda(i) < 0 ? -1.0 : 1.0;
              e = delta * s1(0) * basis * sg.asDiagonal() * basis.transpose();
              break;
            }
          }
          const Matrix m2 = m1 + e;
          const double ratio = m2.determinant() / m1.determinant();
          return TrialValue{std::abs(ratio - 1.0), bound};
        }
      },
      threads);
  InequalityReport r = reduce(corrected ? "determinant_ratio_corrected" : "determinant_ratio", vals);
  r.params = {{"N", N}, {"delta", delta}, {"bound", bound}, {"form", corrected ? "(1+delta)^N - 1" : "N^(N/2) delta^N"},
              {"ensembles", {"random symmetric, random size", "random symmetric, boundary size", "aligned with M1"}},
              {"counterexample", {{"M1", "I_2"}, {"M2", "(1+delta) I_2"},
                                  {"deviation", std::pow(1.0 + delta, 2) - 1.0},
                                  {"stated_bound", 2.0 * delta * delta}}}};
  return r;
}

Matrix ProductMap::eval(const Vector& x) const {
  require(x.size() == dim(), "ProductMap::eval: wrong point length");
  Matrix acc = Matrix::Identity(n(), n());
  for (int k = 0; k < dim(); ++k) acc = acc * R[k] * mat_exp_skew((theta[k] + x(k)) * a[k]);
  return acc;
}

Matrix ProductMap::derivative(const Vector& x, const Vector& h) const {
  require(x.size() == dim() && h.size() == dim(), "ProductMap::derivative: wrong vector length");
  const int m = dim();
  std::vector<Matrix> factor(m);
  for (int k = 0; k < m; ++k) factor[k] = R[k] * mat_exp_skew((theta[k] + x(k)) * a[k]);
  std::vector<Matrix> suffix(m + 1, Matrix::Identity(n(), n()));
  for (int k = m; k-- > 0;) suffix[k] = factor[k] * suffix[k + 1];
  Matrix out = Matrix::Zero(n(), n());
  Matrix prefix = Matrix::Identity(n(), n());
  for (int j = 0; j < m; ++j) {
    out += h(j) * (prefix * factor[j] * a[j] * suffix[j + 1]);
    prefix = prefix * factor[j];
  }
  return out;
}

ProductMap random_product_map(int n, Rng& rng) {
  ProductMap f;
  const int big_n = plane_count(n);
  for (int k = 0; k < big_n; ++k) {
    f.R.push_back(haar_sample(n, rng));
    f.theta.push_back(rng.angle());
    f.a.push_back(basis_element(n, rng.uniform_int(1, big_n)));
  }
  return f;
}

namespace {

Vector uniform_cube(int m, double c, Rng& rng) {
  Vector v(m);
  for (int i = 0; i < m; ++i) v(i) = rng.uniform(-c, c);
  return v;
}

Vector unit_direction(int m, Rng& rng) {
  Vector v(m);
  for (int i = 0; i < m; ++i) v(i) = rng.normal();
  return v / v.norm();
}

}  // namespace

InequalityReport exp_approx_oracle(const std::vector<int>& dims, double c, std::int64_t trials,
                                   std::uint64_t seed, int threads) {
  require(!dims.empty() && c > 0.0, "exp_approx_oracle: invalid parameters");
  struct Out {
    TrialValue tv;
    double squared;
  };
  auto vals = parallel_map(
      trials,
      [&](std::int64_t r) {
        Rng rng = make_stream(seed, "exp_approx", static_cast<std::uint64_t>(r));
        const int n = dims[static_cast<std::size_t>(r) % dims.size()];
        const ProductMap f = random_product_map(n, rng);
        const int big_n = f.dim();
        const Vector x = uniform_cube(big_n, c, rng);
        const Matrix f0 = f.eval(Vector::Zero(big_n));
        const Matrix lin = project_skew(f0.transpose() * f.derivative(Vector::Zero(big_n), x));
        const double v = (f.eval(x) - f0 * mat_exp_skew(lin)).norm();
        return Out{TrialValue{v, 8.0 * big_n * big_n * c * c}, v * v};
      },
      threads);
  std::vector<TrialValue> tvs;
  std::int64_t squared_violations = 0;
  double max_ratio = 0.0;
  for (const Out& o : vals) {
    tvs.push_back(o.tv);
    if (o.squared > o.tv.bound + kViolationTol) ++squared_violations;
    max_ratio = std::max(max_ratio, o.tv.value / o.tv.bound);
  }
  InequalityReport r = reduce("exp_approx", tvs);
  r.params = {{"dims", dims}, {"c", c}, {"form", "unsquared"}, {"bound", "8 N^2 c^2"},
              {"squared_form_violations", squared_violations}, {"max_value_over_bound", max_ratio}};
  return r;
}

InequalityReport tangent_closeness_oracle(const std::vector<int>& dims, double c, std::int64_t trials,
                                          std::uint64_t seed, int threads) {
  require(!dims.empty() && c > 0.0, "tangent_closeness_oracle: invalid parameters");
  struct Out {
    TrialValue first;
    TrialValue second;
  };
  auto vals = parallel_map(
      trials,
      [&](std::int64_t r) {
        Rng rng = make_stream(seed, "tangent_close", static_cast<std::uint64_t>(r));
        const int n = dims[static_cast<std::size_t>(r) % dims.size()];
        const ProductMap f = random_product_map(n, rng);
        const int big_n = f.dim();
        const Vector x = uniform_cube(big_n, c, rng);
        const Vector y = uniform_cube(big_n, c, rng);
        const Vector h = unit_direction(big_n, rng);
        const Matrix dfx = f.derivative(x, h);
        const Matrix dfy = f.derivative(y, h);
        const double b2 = static_cast<double>(big_n) * big_n;
        const double v1 = (dfx - dfy).norm();
        const double v2 = (f.eval(y) * f.eval(x).transpose() * dfx - dfy).norm();
        return Out{TrialValue{v1, 4.0 * b2 * c}, TrialValue{v2, 8.0 * b2 * c}};
      },
      threads);
  std::vector<TrialValue> first, second;
  for (const Out& o : vals) {
    first.push_back(o.first);
    second.push_back(o.second);
  }
  InequalityReport r = reduce("tangent_closeness", first);
  const InequalityReport r2 = reduce("tangent_closeness_translated", second);
  r.params = {{"dims", dims}, {"c", c}, {"bound", "4 N^2 c"},
              {"translated_bound", "8 N^2 c"}, {"translated_violations", r2.violations},
              {"translated_worst_slack", r2.worst_slack}};
  r.violations += r2.violations;
  r.worst_slack = std::min(r.worst_slack, r2.worst_slack);
  return r;
}

InequalityReport sphere_conditional_density_probe(int n, int k, std::int64_t samples, std::uint64_t seed) {
  require(n >= 2 && k >= 0 && k <= n - 2, "sphere probe: need 0 <= k <= n - 2");
  require(samples > 0, "sphere probe: samples must be positive");
  Rng rng = make_stream(seed, "sphere_probe", static_cast<std::uint64_t>(n * 1000 + k));
  auto sphere = [&]() {
    Vector v(n);
    for (int i = 0; i < n; ++i) v(i) = rng.normal();
    return Vector(v / v.norm());
  };
  const double dn = n;
  const double t1 = std::pow(dn, -20.0);
  const double t2 = std::pow(dn, -5.0);
  std::int64_t e1 = 0, e2 = 0;
  std::vector<double> density_bound;
  density_bound.reserve(static_cast<std::size_t>(samples));
  for (std::int64_t s = 0; s < samples; ++s) {
    const Vector x = sphere();
    Matrix v(n, k);
    for (int j = 0; j < k; ++j) v.col(j) = sphere();
    const Vector w = sphere();
    Vector x_perp = x, w_perp = w;
    if (k > 0) {
      Eigen::HouseholderQR<Matrix> qr(v);
      const Matrix basis = qr.householderQ() * Matrix::Identity(n, k);
      x_perp -= basis * (basis.transpose() * x);
      w_perp -= basis * (basis.transpose() * w);
    }
    const double one_minus_xh = x_perp.squaredNorm();
    const double vplus2 = w_perp.squaredNorm();
    if (one_minus_xh <= t1) ++e1;
    if (vplus2 <= t2) ++e2;
    density_bound.push_back(2.0 / (kTwoPi / 2) / std::sqrt(vplus2 * one_minus_xh));
  }
  const double m = static_cast<double>(samples);
  const double p1 = static_cast<double>(e1) / m, p2 = static_cast<double>(e2) / m;
  const double target = 1.0 / (dn * dn);
  auto se = [m, target](double) { return 3.0 * std::sqrt(target * (1.0 - target) / m); };
  InequalityReport r = reduce("sphere_conditional_density",
                              {TrialValue{p1, target + se(p1)}, TrialValue{p2, target + se(p2)}});
  r.trials = samples;
  std::sort(density_bound.begin(), density_bound.end());
  auto q = [&](double level) {
    const auto idx = static_cast<std::size_t>(std::ceil(level * m)) - 1;
    return density_bound[std::min(idx, density_bound.size() - 1)];
  };
  r.params = {{"n", n}, {"k", k}, {"samples", samples},
              {"p_one_minus_xh_le_n^-20", p1}, {"p_vplus_sq_le_n^-5", p2}, {"threshold_n^-2", target},
              {"density_bound_quantiles", {{"0.5", q(0.5)}, {"0.9", q(0.9)}, {"0.99", q(0.99)},
                                           {"max", density_bound.back()}}},
              {"density_bound_exceeds_n^20", static_cast<std::int64_t>(std::count_if(
                                                 density_bound.begin(), density_bound.end(),
                                                 [&](double b) { return b > std::pow(dn, 20.0); }))}};
  return r;
}

DriftTable d_vs_dinfinity_drift(int n, const std::vector<double>& Q_grid, std::int64_t samples,
                                std::uint64_t seed, int threads) {
  require(n >= 3, "drift table needs n >= 3 so that N >= 3");
  require(samples > 0, "drift table: samples must be positive");
  for (double Q : Q_grid) require(Q > 0.0, "drift table: Q must be positive");
  const int big_n = plane_count(n);
  using Pair = std::pair<double, double>;
  auto entries = [&](const Matrix& d) { return Pair{d(0, 1), d(0, big_n - 1)}; };
  auto split = [](const std::vector<Pair>& v, bool first) {
    std::vector<double> out;
    out.reserve(v.size());
    for (const Pair& p : v) out.push_back(first ? p.first : p.second);
    return out;
  };
  const auto dinf = parallel_map(
      samples,
      [&](std::int64_t r) {
        Rng rng = make_stream(seed, "drift_dinf", static_cast<std::uint64_t>(r));
        return entries(d_infinity(n, rng));
      },
      threads);
  const auto control = parallel_map(
      samples,
      [&](std::int64_t r) {
        Rng rng = make_stream(seed, "drift_control", static_cast<std::uint64_t>(r));
        return entries(d_infinity(n, rng));
      },
      threads);
  DriftTable t;
  t.n = n;
  t.samples = samples;
  t.control_ks = ks_two_sample(split(dinf, true), split(control, true));
  t.control_critical95 = ks_two_sample_critical95(static_cast<std::size_t>(samples),
                                                  static_cast<std::size_t>(samples));
  for (std::size_t qi = 0; qi < Q_grid.size(); ++qi) {
    const double Q = Q_grid[qi];
    const std::uint64_t qseed = mix_seed(seed, tag_of("drift_q"), qi);
    const auto d = parallel_map(
        samples,
        [&](std::int64_t r) {
          Rng rng = make_stream(qseed, "drift_d", static_cast<std::uint64_t>(r));
          return entries(sample_d_matrix(n, Q, rng));
        },
        threads);
    t.rows.push_back(DriftRow{Q, ks_two_sample(split(d, true), split(dinf, true)),
                              ks_two_sample(split(d, false), split(dinf, false))});
  }
  return t;
}

const std::vector<std::string>& lemma_names() {
  static const std::vector<std::string> names{"telescoping", "determinant_ratio", "determinant_ratio_corrected",
                                              "exp_approx",  "tangent_closeness", "small_ball",
                                              "sphere_density"};
  return names;
}

InequalityReport merge_reports(const std::string& lemma, const std::vector<InequalityReport>& parts) {
  InequalityReport r;
  r.lemma = lemma;
  r.worst_slack = std::numeric_limits<double>::infinity();
  nlohmann::json comps = nlohmann::json::array();
  for (const InequalityReport& p : parts) {
    r.trials += p.trials;
    r.violations += p.violations;
    r.worst_slack = std::min(r.worst_slack, p.worst_slack);
    comps.push_back(to_json(p));
  }
  if (parts.empty()) r.worst_slack = 0.0;
  r.params = {{"components", comps}};
  return r;
}

InequalityReport run_lemma(const std::string& name, std::int64_t trials, std::uint64_t seed, int threads) {
  require(trials >= 1, "run_lemma: trials must be positive");
  const std::uint64_t sub = mix_seed(seed, tag_of(name), 0);
  if (name == "telescoping") return telescoping_oracle(trials, 5, 6, sub, threads);
  if (name == "determinant_ratio" || name == "determinant_ratio_corrected") {
    const bool corrected = name == "determinant_ratio_corrected";
    std::vector<InequalityReport> parts;
    std::uint64_t idx = 0;
    for (int N : {2, 3, 4, 6})
      for (double delta : {0.1, 0.5})
        parts.push_back(determinant_ratio_oracle(N, delta, trials, mix_seed(sub, tag_of("config"), idx++),
                                                 corrected, threads));
    return merge_reports(name, parts);
  }
  if (name == "exp_approx") return exp_approx_oracle({3, 4}, 1e-3, trials, sub, threads);
  if (name == "tangent_closeness") return tangent_closeness_oracle({3, 4}, 1e-4, trials, sub, threads);
  if (name == "small_ball") return small_ball_sweep(trials, 10000, sub, threads);
  if (name == "sphere_density") {
    std::vector<InequalityReport> parts;
    const std::int64_t samples = std::max<std::int64_t>(trials, 10000);
    for (int k : {0, 4, 8}) parts.push_back(sphere_conditional_density_probe(10, k, samples, sub));
    return merge_reports(name, parts);
  }
  throw DomainError("unknown lemma '" + name + "'");
}

}  // namespace kaclab
