#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "kaclab/coupling.hpp"
#include "kaclab/errors.hpp"
#include "kaclab/stats.hpp"

using namespace kaclab;

namespace {

InducedMapSpec two_dim_spec(double theta, double eps) {
  InducedMapSpec s;
  s.base = Matrix::Identity(2, 2);
  s.horizon = 1;
  s.marked = {0};
  s.planes = {1};
  s.eta = {theta};
  s.half_width = eps;
  return s;
}

Matrix near(const Matrix& x, double dist, Rng& rng) {
  const int n = static_cast<int>(x.rows());
  Matrix a = Matrix::Zero(n, n);
  for (int i = 1; i <= plane_count(n); ++i) a += rng.normal() * basis_element(n, i);
  return x * mat_exp_skew(dist / a.norm() * a);
}

}  // namespace

TEST(Schedule, LazyGapAndExamples) {
  EXPECT_EQ(lazy_gap(4, 1.0), 23);
  EXPECT_EQ(lazy_gap(2, 1.0), 3);
  const Schedule g = greedy_schedule({1, 1, 2, 1, 3, 2}, 3);
  EXPECT_EQ(g.marked, (std::vector<int>{0, 2, 4}));
  EXPECT_EQ(g.horizon, 5);
  // n = 2: gap 3, only plane 1, marked at the first step
  const Schedule l2 = lazy_schedule({1, 1, 1}, 2, 1.0);
  EXPECT_EQ(l2.marked, (std::vector<int>{0}));
  EXPECT_EQ(l2.horizon, 1);
  EXPECT_THROW(greedy_schedule({1, 2, 1}, 3), InsufficientCoverage);
  EXPECT_THROW(lazy_schedule({2, 3, 1}, 3, 1.0), InsufficientCoverage);
  EXPECT_EQ(parse_flavor("lazy"), ScheduleFlavor::Lazy);
  EXPECT_STREQ(to_string(ScheduleFlavor::Greedy), "greedy");
  EXPECT_THROW(parse_flavor("eager"), DomainError);
}

TEST(Schedule, LazyRuleAgainstDirectScan) {
  Rng rng(1);
  const int n = 3;
  const int gap = lazy_gap(n, 0.5);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<int> planes;
    for (int t = 0; t < 400; ++t) planes.push_back(random_update(n, rng).plane);
    // oracle: the definition applied literally
    std::vector<int> want;
    int from = 0;
    bool ok = true;
    for (int l = 1; l <= 3 && ok; ++l) {
      int t = from;
      while (t < 400 && planes[t] != l) ++t;
      if (t == 400) ok = false;
      else {
        want.push_back(t);
        from = t + gap;
      }
    }
    if (!ok) {
      EXPECT_THROW(lazy_schedule(planes, n, 0.5), InsufficientCoverage);
      continue;
    }
    const Schedule s = lazy_schedule(planes, n, 0.5);
    EXPECT_EQ(s.marked, want);
    EXPECT_EQ(s.horizon, want.back() + 1);
    for (std::size_t j = 1; j < s.marked.size(); ++j) EXPECT_GE(s.marked[j] - s.marked[j - 1], gap);
  }
}

TEST(Schedule, BuilderMatchesBatchRule) {
  Rng rng(2);
  for (int trial = 0; trial < 100; ++trial) {
    ScheduleBuilder b = ScheduleBuilder::greedy(6);
    std::vector<int> planes;
    while (!b.push(planes.emplace_back(random_update(4, rng).plane))) {
    }
    const Schedule s = b.finish();
    EXPECT_EQ(s.marked, greedy_schedule(planes, 4).marked);
    EXPECT_EQ(static_cast<std::size_t>(s.horizon), planes.size());
    // every plane occurs at exactly one marked time
    std::vector<int> hit;
    for (int t : s.marked) hit.push_back(planes[t]);
    std::sort(hit.begin(), hit.end());
    EXPECT_EQ(hit, (std::vector<int>{1, 2, 3, 4, 5, 6}));
  }
  EXPECT_THROW(ScheduleBuilder::lazy(3, 1.0).finish(), InsufficientCoverage);
}

TEST(ContractiveStep, TwoDimensionalClosedForm) {
  for (double alpha : {0.1, 1.0, -2.0})
    for (double beta : {0.0, 0.3, 2.5}) {
      const double ey = contractive_step(rotation_matrix(2, 1, alpha), rotation_matrix(2, 1, beta), 1, 0.5);
      EXPECT_NEAR(angle_distance(ey, 0.5 + std::sin(alpha - beta)), 0.0, 1e-14);
    }
  Rng rng(3);
  const Matrix x = haar_sample(5, rng);
  for (int i = 1; i <= 10; ++i) EXPECT_EQ(contractive_step(x, x, i, 1.25), 1.25);
}

TEST(ContractiveStep, MatchesInnerProductFormula) {
  Rng rng(4);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = rng.uniform_int(2, 6);
    const Matrix x = haar_sample(n, rng);
    const Matrix y = haar_sample(n, rng);
    const int i = rng.uniform_int(1, plane_count(n));
    const Matrix m = x * y.transpose() - Matrix::Identity(n, n);
    const double oracle = wrap_angle(0.3 + hs_inner(project_skew(m), basis_element(n, i)) / std::sqrt(2.0));
    EXPECT_NEAR(angle_distance(contractive_step(x, y, i, 0.3), oracle), 0.0, 1e-13);
  }
}

TEST(ContractiveCoupling, SecondChainIsAKacWalk) {
  // each eta_y is a deterministic shift of an independent uniform eta_x,
  // so it is uniform as well
  Rng rng(5);
  const Matrix x0 = haar_sample(4, rng);
  const Matrix y0 = haar_sample(4, rng);
  const ContractiveRun run = run_contractive_coupling(x0, y0, 20000, rng);
  EXPECT_LT(ks_statistic(run.eta_y, [](double e) { return e / kTwoPi; }), 0.015);
  ASSERT_EQ(run.trace.dist_scaffold.size(), 20001u);
  EXPECT_LT(orthogonality_error(run.y_final), 1e-8);
}

TEST(ContractiveCoupling, ContractsAndSnaps) {
  Rng rng(6);
  const int n = 4;
  const Matrix x0 = haar_sample(n, rng);
  const Matrix y0 = near(x0, 1e-3, rng);
  const ContractiveRun run = run_contractive_coupling(x0, y0, 3000, rng);
  EXPECT_NEAR(run.trace.dist_scaffold[0], 1e-3, 1e-9);
  EXPECT_TRUE(run.trace.coalesced);
  ASSERT_GT(run.trace.step, 0);
  for (std::size_t t = run.trace.step; t < run.trace.dist_scaffold.size(); ++t)
    ASSERT_EQ(run.trace.dist_scaffold[t], 0.0);
  EXPECT_EQ(run.x_final, run.y_final);
  EXPECT_LT(contraction_fit(run.trace).slope, 0.0);

  const ContractiveRun same = run_contractive_coupling(x0, x0, 5, rng);
  EXPECT_TRUE(same.trace.coalesced);
  EXPECT_EQ(same.trace.step, 0);
  EXPECT_EQ(same.eta_x, same.eta_y);
}

TEST(ContractiveCoupling, TwoDimensionalGapRecursion) {
  // the angular gap g obeys g <- g - sin g
  Rng rng(7);
  const ContractiveRun run =
      run_contractive_coupling(rotation_matrix(2, 1, 0.4), Matrix::Identity(2, 2), 5, rng, 0.0);
  double g = 0.4;
  for (int t = 1; t <= 5; ++t) {
    g -= std::sin(g);
    EXPECT_NEAR(run.trace.dist_scaffold[t], 2.0 * std::abs(std::sin(g / 2)) * std::sqrt(2.0), 1e-12);
  }
}

TEST(NMCoupling, SpecsShareEverythingButBaseAndAngles) {
  Rng rng(8);
  const Matrix x0 = haar_sample(3, rng);
  const Matrix y0 = near(x0, 1e-6, rng);
  const NMCoupling c = build_nm_coupling(x0, y0, 0.5, 0.05, ScheduleFlavor::Lazy, rng);
  validate(c.spec_a);
  validate(c.spec_b);
  EXPECT_EQ(c.spec_a.planes, c.spec_b.planes);
  EXPECT_EQ(c.spec_a.marked, c.schedule.marked);
  EXPECT_EQ(c.spec_a.horizon, c.schedule.horizon);
  EXPECT_EQ(static_cast<int>(c.spec_a.planes.size()), c.spec_a.horizon);
  EXPECT_LT((induced_map_eval(c.spec_a, Vector::Zero(3)) - c.x_hat).norm(), 1e-12);
  EXPECT_LT((induced_map_eval(c.spec_b, Vector::Zero(3)) - c.y_hat).norm(), 1e-12);
  EXPECT_FALSE(c.trace.coalesced);
  EXPECT_THROW(build_nm_coupling(x0, y0, 0.5, 4.0, ScheduleFlavor::Lazy, rng), DomainError);
}

TEST(Inverse, RecoversKnownPreimage) {
  Rng rng(9);
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix x0 = haar_sample(3, rng);
    const NMCoupling c = build_nm_coupling(x0, x0, 0.5, 0.05, ScheduleFlavor::Lazy, rng);
    Vector x(3);
    for (int i = 0; i < 3; ++i) x(i) = rng.uniform(-0.05, 0.05);
    const InverseResult r = invert_induced_map(c.spec_a, induced_map_eval(c.spec_a, x), Vector::Zero(3));
    ASSERT_TRUE(r.converged()) << to_string(r.status);
    EXPECT_LT((r.x - x).cwiseAbs().maxCoeff(), 1e-8);
  }
  const InducedMapSpec s = two_dim_spec(0.0, 0.1);
  const InverseResult far = invert_induced_map(s, rotation_matrix(2, 1, 1.0), Vector::Zero(1));
  EXPECT_EQ(far.status, InverseStatus::LeftBox);
  InverseOptions none;
  none.max_iterations = 0;
  EXPECT_EQ(invert_induced_map(s, rotation_matrix(2, 1, 0.05), Vector::Zero(1), none).status,
            InverseStatus::NotConverged);
}

TEST(Coalesce, IdenticalSpecsAlwaysCoalesce) {
  Rng rng(10);
  const Matrix x0 = haar_sample(3, rng);
  const NMCoupling c = build_nm_coupling(x0, x0, 0.5, 0.05, ScheduleFlavor::Lazy, rng);
  for (int trial = 0; trial < 50; ++trial) {
    const CoalesceResult r = coalesce_attempt(c.spec_a, c.spec_a, rng);
    ASSERT_TRUE(r.coalesced);
    EXPECT_LT((r.dx - r.dy).cwiseAbs().maxCoeff(), 1e-9);
  }
}

TEST(Coalesce, TwoDimensionalOverlapProbability) {
  // f_A(x) = R(theta + x), f_B(y) = R(theta' + y): two uniform intervals of
  // width 2 eps offset by |theta - theta'|; the maximal coupling merges with
  // probability equal to their overlap fraction
  Rng rng(11);
  const double eps = 0.1;
  const double theta = 0.5, theta2 = 0.56;
  const InducedMapSpec a = two_dim_spec(theta, eps);
  const InducedMapSpec b = two_dim_spec(theta2, eps);
  int hits = 0;
  const int trials = 4000;
  std::vector<double> xs, ys;
  for (int t = 0; t < trials; ++t) {
    const CoalesceResult r = coalesce_attempt(a, b, rng);
    xs.push_back(r.dx(0));
    ys.push_back(r.dy(0));
    if (r.coalesced) {
      ++hits;
      EXPECT_LT((induced_map_eval(a, r.dx) - induced_map_eval(b, r.dy)).norm(), 1e-10);
    }
  }
  const double expected = 1.0 - std::abs(theta - theta2) / (2 * eps);
  EXPECT_NEAR(static_cast<double>(hits) / trials, expected, 4 * std::sqrt(expected * (1 - expected) / trials));
  auto u = [eps](double v) { return (v + eps) / (2 * eps); };
  EXPECT_LT(ks_statistic(xs, u), 0.03);
  EXPECT_LT(ks_statistic(ys, u), 0.03);

  const InducedMapSpec disjoint = two_dim_spec(theta + 0.3, eps);
  for (int t = 0; t < 100; ++t) EXPECT_FALSE(coalesce_attempt(a, disjoint, rng).coalesced);
}

TEST(Coalesce, RejectsMismatchedSpecsAndExhaustsBudget) {
  const InducedMapSpec a = two_dim_spec(0.0, 0.1);
  InducedMapSpec b = two_dim_spec(0.0, 0.2);
  Rng rng(12);
  EXPECT_THROW(coalesce_attempt(a, b, rng), DomainError);
  CoalesceOptions opt;
  opt.retry_budget = 0;
  opt.inverse.max_iterations = 0;
  b = two_dim_spec(0.05, 0.1);
  EXPECT_THROW(coalesce_attempt(a, b, rng, opt), CouplingNumericsExhausted);
}

TEST(RealizeMainTrace, EndsAtZeroWhenCoalesced) {
  Rng rng(13);
  const Matrix x0 = haar_sample(3, rng);
  const Matrix y0 = near(x0, 1e-7, rng);
  const NMCoupling c = build_nm_coupling(x0, y0, 0.5, 0.05, ScheduleFlavor::Lazy, rng);
  for (int attempt = 0; attempt < 20; ++attempt) {
    const CoalesceResult r = coalesce_attempt(c.spec_a, c.spec_b, rng);
    CouplingTrace trace = c.trace;
    realize_main_trace(c, r, trace);
    ASSERT_EQ(trace.dist_main.size(), static_cast<std::size_t>(c.spec_a.horizon) + 1);
    EXPECT_NEAR(trace.dist_main[0], 1e-7, 1e-12);
    if (r.coalesced) {
      EXPECT_EQ(trace.dist_main.back(), 0.0);
      EXPECT_EQ(trace.step, c.spec_a.horizon);
      return;
    }
  }
  FAIL() << "no coalescence in 20 attempts at distance 1e-7";
}
