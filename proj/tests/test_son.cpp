#include <gtest/gtest.h>

#include <cmath>

#include "kaclab/errors.hpp"
#include "kaclab/son.hpp"
#include "kaclab/stats.hpp"

using namespace kaclab;

namespace {

constexpr double kPi = 3.14159265358979323846;

Matrix random_matrix(int n, Rng& rng) {
  Matrix m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = rng.normal();
  return m;
}

Matrix random_skew(int n, Rng& rng, double norm) {
  const Matrix g = random_matrix(n, rng);
  Matrix a = g - g.transpose();
  return a * (norm / a.norm());
}

// Composite Simpson rule on [lo, hi].
template <class F>
double simpson(F f, double lo, double hi, int intervals) {
  const double h = (hi - lo) / intervals;
  double s = f(lo) + f(hi);
  for (int i = 1; i < intervals; ++i) s += f(lo + i * h) * (i % 2 ? 4.0 : 2.0);
  return s * h / 3.0;
}

}  // namespace

TEST(PlaneIndex, LexicographicExamples) {
  EXPECT_EQ(plane_to_axes(3, 1), (Plane{1, 2}));
  EXPECT_EQ(plane_to_axes(3, 3), (Plane{2, 3}));
  EXPECT_EQ(plane_to_axes(4, 4), (Plane{2, 3}));
}

TEST(PlaneIndex, RoundTripMatchesEnumeration) {
  for (int n = 2; n <= 9; ++n) {
    int i = 0;
    for (int k = 1; k <= n; ++k)
      for (int l = k + 1; l <= n; ++l) {
        ++i;
        EXPECT_EQ(plane_to_axes(n, i), (Plane{k, l}));
        EXPECT_EQ(axes_to_plane(n, k, l), i);
      }
    EXPECT_EQ(i, plane_count(n));
  }
}

TEST(PlaneIndex, OutOfRangeIsDomainError) {
  EXPECT_THROW(plane_to_axes(3, 0), DomainError);
  EXPECT_THROW(plane_to_axes(3, 4), DomainError);
  EXPECT_THROW(plane_to_axes(1, 1), DomainError);
}

TEST(Angles, WrapAndDistance) {
  EXPECT_DOUBLE_EQ(wrap_angle(-0.5), kTwoPi - 0.5);
  EXPECT_DOUBLE_EQ(wrap_angle(kTwoPi), 0.0);
  EXPECT_NEAR(angle_distance(0.1, kTwoPi - 0.1), 0.2, 1e-15);
  EXPECT_NEAR(angle_distance(kPi, 0.0), kPi, 1e-15);
}

TEST(Rotation, QuarterTurnExample) {
  Matrix expected(3, 3);
  expected << 0, 1, 0, -1, 0, 0, 0, 0, 1;
  EXPECT_LT((rotation_matrix(3, 1, kPi / 2) - expected).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Rotation, ZeroAngleIsIdentityAndHalfTurn) {
  for (int i = 1; i <= plane_count(5); ++i)
    EXPECT_EQ(rotation_matrix(5, i, 0.0), Matrix::Identity(5, 5));
  EXPECT_LT((rotation_matrix(2, 1, kPi) + Matrix::Identity(2, 2)).norm(), 1e-15);
}

TEST(Rotation, InverseAngleGivesIdentity) {
  Rng rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = rng.uniform_int(2, 7);
    const int i = rng.uniform_int(1, plane_count(n));
    const double th = rng.angle();
    EXPECT_LT((rotation_matrix(n, i, th) * rotation_matrix(n, i, -th) - Matrix::Identity(n, n)).norm(), 1e-12);
  }
}

TEST(Rotation, LeftUpdateMatchesDenseProduct) {
  Rng rng(12);
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = rng.uniform_int(2, 8);
    const Matrix x = haar_sample(n, rng);
    const int i = rng.uniform_int(1, plane_count(n));
    const double th = rng.angle();
    const Matrix dense = rotation_matrix(n, i, th) * x;
    EXPECT_LT((rotated_left(x, i, th) - dense).cwiseAbs().maxCoeff(), 1e-12);
  }
  Rng r2(1);
  const Matrix x = haar_sample(4, r2);
  EXPECT_EQ(rotated_left(x, 3, 0.0), x);
  EXPECT_LT((rotated_left(Matrix::Identity(3, 3), 1, kPi / 2) - rotation_matrix(3, 1, kPi / 2)).norm(), 1e-15);
}

TEST(Basis, ElementAndOrthonormality) {
  Matrix a(2, 2);
  a << 0, 1, -1, 0;
  EXPECT_LT((basis_element(2, 1) - a / std::sqrt(2.0)).norm(), 1e-15);
  for (int n : {3, 4, 6}) {
    for (int i = 1; i <= plane_count(n); ++i)
      for (int j = 1; j <= plane_count(n); ++j)
        EXPECT_NEAR(hs_inner(basis_element(n, i), basis_element(n, j)), i == j ? 1.0 : 0.0, 1e-14);
  }
}

TEST(Basis, RotationIsExponentialOfScaledGenerator) {
  Rng rng(13);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = rng.uniform_int(2, 6);
    const int i = rng.uniform_int(1, plane_count(n));
    const double th = rng.angle();
    const Matrix e = mat_exp_skew(std::sqrt(2.0) * th * basis_element(n, i));
    EXPECT_LT((e - rotation_matrix(n, i, th)).cwiseAbs().maxCoeff(), 1e-10);
  }
}

TEST(HsInner, Examples) {
  EXPECT_DOUBLE_EQ(hs_inner(Matrix::Identity(3, 3), Matrix::Identity(3, 3)), 3.0);
  Rng rng(14);
  const Matrix a = random_matrix(5, rng), b = random_matrix(5, rng);
  double s = 0.0;
  for (int p = 0; p < 5; ++p)
    for (int q = 0; q < 5; ++q) s += a(p, q) * b(p, q);
  EXPECT_NEAR(hs_inner(a, b), s, 1e-12);
  EXPECT_NEAR(hs_inner(a, b), (a.transpose() * b).trace(), 1e-12);
  EXPECT_THROW(hs_inner(Matrix::Zero(2, 2), Matrix::Zero(3, 3)), DomainError);
}

TEST(ProjectSkew, ExamplesAndBasisExpansionOracle) {
  Matrix g(2, 2);
  g << 0, 2, 0, 0;
  Matrix expected(2, 2);
  expected << 0, 1, -1, 0;
  EXPECT_EQ(project_skew(g), expected);
  Rng rng(15);
  const Matrix sym = random_matrix(4, rng);
  EXPECT_LT(project_skew(sym + sym.transpose()).norm(), 1e-15);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = rng.uniform_int(2, 6);
    const Matrix m = random_matrix(n, rng);
    Matrix oracle = Matrix::Zero(n, n);
    for (int i = 1; i <= plane_count(n); ++i) oracle += hs_inner(m, basis_element(n, i)) * basis_element(n, i);
    EXPECT_LT((project_skew(m) - oracle).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_LT((project_skew(project_skew(m)) - project_skew(m)).norm(), 1e-15);
    const Matrix h = random_skew(n, rng, 1.0);
    EXPECT_NEAR(hs_inner(project_skew(m), h), hs_inner(m, project_skew(h)), 1e-12);
  }
}

TEST(SkewCoordinates, RoundTrip) {
  Rng rng(16);
  for (int n = 2; n <= 6; ++n) {
    const Matrix a = random_skew(n, rng, 2.0);
    EXPECT_LT((from_skew_coordinates(n, skew_coordinates(a)) - a).norm(), 1e-14);
    EXPECT_NEAR(skew_coordinates(a).norm(), a.norm(), 1e-13);
  }
}

TEST(MatExp, ZeroAndTaylorOracle) {
  EXPECT_EQ(mat_exp_skew(Matrix::Zero(4, 4)), Matrix::Identity(4, 4));
  Rng rng(17);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = rng.uniform_int(2, 6);
    const Matrix a = random_skew(n, rng, rng.uniform(0.0, 1.0));
    Matrix series = Matrix::Identity(n, n), term = Matrix::Identity(n, n);
    for (int k = 1; k <= 30; ++k) {
      term = term * a / k;
      series += term;
    }
    EXPECT_LT((mat_exp_skew(a) - series).norm(), 1e-10);
  }
}

TEST(MatExp, OrthogonalForLargeArguments) {
  Rng rng(18);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = rng.uniform_int(2, 8);
    const Matrix e = mat_exp_skew(random_skew(n, rng, rng.uniform(0.0, 10.0)));
    EXPECT_LE(orthogonality_error(e), 1e-10);
    EXPECT_GT(e.determinant(), 0.0);
  }
}

TEST(MatExp, RejectsBadInput) {
  Matrix a = Matrix::Zero(2, 2);
  a(0, 1) = std::nan("");
  EXPECT_THROW(mat_exp_skew(a), NumericError);
  EXPECT_THROW(mat_exp_skew(Matrix::Identity(2, 2)), DomainError);
}

TEST(Haar, MomentsOfFirstEntry) {
  Rng rng(19);
  const int n = 4;
  const int draws = 100000;
  double m1 = 0.0, m2 = 0.0;
  Vector col_sq = Vector::Zero(n);
  for (int s = 0; s < draws; ++s) {
    const Matrix x = haar_sample(n, rng);
    ASSERT_GT(x.determinant(), 0.0);
    m1 += x(0, 0);
    m2 += x(0, 0) * x(0, 0);
    col_sq += x.col(2).cwiseAbs2();
  }
  EXPECT_NEAR(m1 / draws, 0.0, 0.01);
  EXPECT_NEAR(m2 / draws, 1.0 / n, 0.005);
  // squared coordinate of a uniform point on S^{n-1}: mean 1/n, variance
  // 2(n-1)/(n^2(n+2))
  const double sigma = std::sqrt(2.0 * (n - 1) / (n * n * (n + 2.0)) / draws);
  for (int i = 0; i < n; ++i) EXPECT_NEAR(col_sq(i) / draws, 1.0 / n, 3.0 * sigma);
}

TEST(Haar, EntryMatchesSphereMarginal) {
  Rng rng(20);
  std::vector<double> xs;
  for (int s = 0; s < 10000; ++s) xs.push_back(haar_sample(6, rng)(0, 0));
  // oracle CDF by direct quadrature of c (1 - x^2)^{3/2}
  const double c = 1.0 / simpson([](double x) { return std::pow(1 - x * x, 1.5); }, -1.0, 1.0, 2000);
  auto cdf = [c](double t) { return c * simpson([](double x) { return std::pow(1 - x * x, 1.5); }, -1.0, t, 400); };
  EXPECT_LT(ks_statistic(xs, cdf), 0.02);
}

TEST(HaarMarginal, DensityValues) {
  for (double x : {-0.9, -0.3, 0.0, 0.5, 0.99}) EXPECT_NEAR(haar_marginal_density(3, x), 0.5, 1e-14);
  // n = 5 normalization oracle: 1 / integral (1 - x^2) dx = 3/4
  const double c5 = 1.0 / simpson([](double x) { return 1 - x * x; }, -1.0, 1.0, 100);
  EXPECT_NEAR(haar_marginal_density(5, 0.0), c5, 1e-12);
  EXPECT_NEAR(haar_marginal_density(5, 0.0), 0.75, 1e-12);
  for (int n : {3, 4, 5, 7, 10}) {
    const double total = simpson([n](double x) { return haar_marginal_density(n, x); }, -1.0, 1.0, 20000);
    EXPECT_NEAR(total, 1.0, n == 4 ? 1e-6 : 1e-8) << "n=" << n;
    EXPECT_NEAR(haar_marginal_cdf(n, 0.3) - haar_marginal_cdf(n, -0.2),
                simpson([n](double x) { return haar_marginal_density(n, x); }, -0.2, 0.3, 2000), 1e-10);
  }
  EXPECT_THROW(haar_marginal_density(5, 1.5), DomainError);
  EXPECT_THROW(haar_marginal_density(2, 0.0), DomainError);
}

TEST(Reorthonormalize, FixedPointPerturbationAndPolicy) {
  Rng rng(21);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = rng.uniform_int(2, 8);
    const Matrix x = haar_sample(n, rng);
    EXPECT_LT((reorthonormalize(x) - x).cwiseAbs().maxCoeff(), 1e-14);
    const Matrix y = reorthonormalize(x + 1e-6 * random_matrix(n, rng));
    EXPECT_LT(orthogonality_error(y), 1e-13);
    EXPECT_GT(y.determinant(), 0.0);
    EXPECT_LT((reorthonormalize(y) - y).cwiseAbs().maxCoeff(), 1e-14);
  }
  Matrix flip = haar_sample(3, rng);
  flip.col(0) *= -1.0;
  EXPECT_THROW(reorthonormalize(flip), NumericError);
  EXPECT_THROW(reorthonormalize(2.0 * Matrix::Identity(3, 3)), NumericError);
}
