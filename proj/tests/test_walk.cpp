#include <gtest/gtest.h>

#include <sstream>

#include "kaclab/errors.hpp"
#include "kaclab/stats.hpp"
#include "kaclab/walk.hpp"

using namespace kaclab;

namespace {
constexpr double kPi = 3.14159265358979323846;
}

TEST(UpdateSequence, EmptyAndDeterministic) {
  Rng rng(1);
  EXPECT_EQ(random_update_sequence(3, 0, rng).size(), 0u);
  Rng a(99), b(99);
  const UpdateSequence sa = random_update_sequence(5, 500, a);
  const UpdateSequence sb = random_update_sequence(5, 500, b);
  for (std::size_t t = 0; t < sa.size(); ++t) {
    EXPECT_EQ(sa.items[t].plane, sb.items[t].plane);
    EXPECT_EQ(sa.items[t].theta, sb.items[t].theta);
  }
  validate(sa);
}

TEST(UpdateSequence, PlaneFrequenciesAreUniform) {
  Rng rng(2);
  const UpdateSequence s = random_update_sequence(3, 100000, rng);
  std::vector<int> counts(4, 0);
  for (const Update& u : s.items) {
    ++counts[u.plane];
    ASSERT_GE(u.theta, 0.0);
    ASSERT_LT(u.theta, kTwoPi);
  }
  for (int i = 1; i <= 3; ++i) EXPECT_NEAR(counts[i] / 1e5, 1.0 / 3.0, 0.01);
}

TEST(RunWalk, Examples) {
  const WalkState id = WalkState::identity(4);
  EXPECT_EQ(run_walk(id, UpdateSequence{4, {}}).X, Matrix::Identity(4, 4));
  const UpdateSequence two{2, {{1, kPi / 2}, {1, kPi / 2}}};
  const WalkState w = run_walk(WalkState::identity(2), two);
  EXPECT_LT((w.X - rotation_matrix(2, 1, kPi)).norm(), 1e-15);
  EXPECT_EQ(w.t, 2);
  EXPECT_THROW(run_walk(WalkState::identity(3), two), DomainError);
}

TEST(RunWalk, OrthogonalityDrift) {
  Rng rng(3);
  const WalkState w = run_walk(WalkState::identity(6), random_update_sequence(6, 10000, rng));
  EXPECT_LT(orthogonality_error(w.X), 1e-8);
  EXPECT_EQ(w.t, 10000);
  // the re-orthonormalization fired exactly once
  EXPECT_EQ(w.since_reortho, 0);
}

TEST(RunWalk, CompositionAndZeroAngles) {
  Rng rng(4);
  const UpdateSequence s1 = random_update_sequence(5, 300, rng);
  const UpdateSequence s2 = random_update_sequence(5, 200, rng);
  UpdateSequence both = s1;
  both.items.insert(both.items.end(), s2.items.begin(), s2.items.end());
  const WalkState start{haar_sample(5, rng), 0, 0};
  const Matrix split = run_walk(run_walk(start, s1), s2).X;
  EXPECT_LT((split - run_walk(start, both).X).cwiseAbs().maxCoeff(), 1e-12);
  UpdateSequence zeros{5, {}};
  for (int i = 1; i <= 10; ++i) zeros.items.push_back({i, 0.0});
  EXPECT_EQ(run_walk(start, zeros).X, start.X);
}

TEST(RunWalk, HaarIsInvariantUnderOneStep) {
  Rng rng(5);
  std::vector<double> entries;
  for (int r = 0; r < 10000; ++r) {
    WalkState s{haar_sample(5, rng), 0, 0};
    step(s, Update{3, 1.0});
    entries.push_back(s.X(0, 1));
  }
  EXPECT_LT(ks_statistic(entries, [](double x) { return haar_marginal_cdf(5, x); }), 0.02);
}

TEST(SphereProjection, Examples) {
  EXPECT_EQ(sphere_projection(WalkState::identity(4)), Vector::Unit(4, 0));
  const WalkState r{rotation_matrix(3, 1, kPi / 2), 0, 0};
  const Vector v = sphere_projection(r);
  EXPECT_NEAR(v(0), 0.0, 1e-15);
  EXPECT_NEAR(v(1), -1.0, 1e-15);
  EXPECT_NEAR(v(2), 0.0, 1e-15);
  Rng rng(6);
  std::vector<double> first;
  for (int s = 0; s < 10000; ++s) {
    const Vector p = sphere_projection(WalkState{haar_sample(5, rng), 0, 0});
    ASSERT_NEAR(p.norm(), 1.0, 1e-9);
    first.push_back(p(0));
  }
  EXPECT_LT(ks_statistic(first, [](double x) { return haar_marginal_cdf(5, x); }), 0.02);
}

TEST(UpdateCsv, BitExactRoundTrip) {
  Rng rng(7);
  const UpdateSequence s = random_update_sequence(4, 1000, rng);
  std::stringstream ss;
  write_update_csv(ss, s);
  const UpdateSequence back = read_update_csv(ss, 4);
  ASSERT_EQ(back.size(), s.size());
  for (std::size_t t = 0; t < s.size(); ++t) {
    EXPECT_EQ(back.items[t].plane, s.items[t].plane);
    EXPECT_EQ(back.items[t].theta, s.items[t].theta);
  }
  std::stringstream bad("t,i,theta\n0,9,0.5\n");
  EXPECT_THROW(read_update_csv(bad, 3), DomainError);
}
