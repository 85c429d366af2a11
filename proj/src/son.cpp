#include "kaclab/son.hpp"

#include <cmath>
#include <string>

#include <boost/math/special_functions/beta.hpp>

#include "kaclab/errors.hpp"

namespace kaclab {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440084436210485;

void check_plane(int n, int i) {
  require(n >= 2, "dimension must be at least 2, got " + std::to_string(n));
  require(i >= 1 && i <= plane_count(n),
          "plane index " + std::to_string(i) + " out of range 1.." + std::to_string(plane_count(n)));
}

}  // namespace

int plane_count(int n) { return n * (n - 1) / 2; }

Plane plane_to_axes(int n, int i) {
  check_plane(n, i);
  int remaining = i;
  for (int k = 1; k < n; ++k) {
    const int row = n - k;
    if (remaining <= row) return Plane{k, k + remaining};
    remaining -= row;
  }
  throw DomainError("unreachable plane index");
}

int axes_to_plane(int n, int k, int l) {
  require(n >= 2 && 1 <= k && k < l && l <= n, "invalid axis pair");
  // planes with first axis < k: sum_{j<k} (n - j)
  int before = (k - 1) * n - (k - 1) * k / 2;
  return before + (l - k);
}

double wrap_angle(double theta) {
  double r = std::fmod(theta, kTwoPi);
  if (r < 0.0) r += kTwoPi;
  if (r >= kTwoPi) r = 0.0;
  return r;
}

double angle_distance(double a, double b) {
  double d = wrap_angle(a - b);
  return d > kTwoPi / 2 ? kTwoPi - d : d;
}

Matrix rotation_matrix(int n, int i, double theta) {
  const Plane p = plane_to_axes(n, i);
  Matrix r = Matrix::Identity(n, n);
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  r(p.k - 1, p.k - 1) = c;
  r(p.l - 1, p.l - 1) = c;
  r(p.k - 1, p.l - 1) = s;
  r(p.l - 1, p.k - 1) = -s;
  return r;
}

void apply_rotation_left(Matrix& x, int i, double theta) {
  const int n = static_cast<int>(x.rows());
  const Plane p = plane_to_axes(n, i);
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  const int k = p.k - 1;
  const int l = p.l - 1;
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    const double xk = x(k, j);
    const double xl = x(l, j);
    x(k, j) = c * xk + s * xl;
    x(l, j) = -s * xk + c * xl;
  }
}

Matrix rotated_left(Matrix x, int i, double theta) {
  apply_rotation_left(x, i, theta);
  return x;
}

Matrix basis_element(int n, int i) {
  const Plane p = plane_to_axes(n, i);
  Matrix a = Matrix::Zero(n, n);
  a(p.k - 1, p.l - 1) = kInvSqrt2;
  a(p.l - 1, p.k - 1) = -kInvSqrt2;
  return a;
}

double hs_inner(const Matrix& a, const Matrix& b) {
  require(a.rows() == b.rows() && a.cols() == b.cols(), "hs_inner: dimension mismatch");
  return (a.array() * b.array()).sum();
}

double hs_norm(const Matrix& a) { return a.norm(); }

Matrix project_skew(const Matrix& g) {
  require(g.rows() == g.cols(), "project_skew: matrix must be square");
  return 0.5 * (g - g.transpose());
}

Vector skew_coordinates(const Matrix& a) {
  require(a.rows() == a.cols(), "skew_coordinates: matrix must be square");
  const int n = static_cast<int>(a.rows());
  Vector c(plane_count(n));
  int i = 0;
  for (int k = 0; k < n; ++k)
    for (int l = k + 1; l < n; ++l) c(i++) = kInvSqrt2 * (a(k, l) - a(l, k));
  return c;
}

Matrix from_skew_coordinates(int n, const Vector& coords) {
  require(coords.size() == plane_count(n), "from_skew_coordinates: wrong coordinate count");
  Matrix a = Matrix::Zero(n, n);
  int i = 0;
  for (int k = 0; k < n; ++k)
    for (int l = k + 1; l < n; ++l) {
      a(k, l) = kInvSqrt2 * coords(i);
      a(l, k) = -kInvSqrt2 * coords(i);
      ++i;
    }
  return a;
}

Matrix mat_exp_skew(const Matrix& a) {
  require(a.rows() == a.cols(), "mat_exp_skew: matrix must be square");
  if (!a.allFinite()) throw NumericError("mat_exp_skew: non-finite entries");
  const double scale = std::max(1.0, a.norm());
  require((a + a.transpose()).norm() <= 1e-12 * scale, "mat_exp_skew: input is not skew-symmetric");

  const Eigen::Index n = a.rows();
  // Scale so that the 1-norm is at most 1/2, sum the Taylor series to
  // machine precision, then square back.
  const double norm1 = a.cwiseAbs().colwise().sum().maxCoeff();
  int squarings = 0;
  if (norm1 > 0.5) squarings = static_cast<int>(std::ceil(std::log2(norm1 / 0.5)));
  const Matrix b = a / std::ldexp(1.0, squarings);

  Matrix sum = Matrix::Identity(n, n);
  Matrix term = Matrix::Identity(n, n);
  for (int k = 1; k <= 40; ++k) {
    term = term * b / static_cast<double>(k);
    sum += term;
    if (term.norm() <= 1e-18 * sum.norm()) break;
  }
  for (int s = 0; s < squarings; ++s) sum = sum * sum;
  return sum;
}

Matrix haar_sample(int n, Rng& rng) {
  require(n >= 2, "haar_sample: n must be at least 2");
  for (;;) {
    Matrix g(n, n);
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) g(i, j) = rng.normal();
    Eigen::HouseholderQR<Matrix> qr(g);
    Matrix q = qr.householderQ();
    const Matrix& r = qr.matrixQR();
    bool degenerate = false;
    for (int j = 0; j < n; ++j) {
      if (r(j, j) == 0.0) {
        degenerate = true;
        break;
      }
      if (r(j, j) < 0.0) q.col(j) *= -1.0;
    }
    if (degenerate) continue;
    if (q.determinant() < 0.0) q.col(0) *= -1.0;
    return q;
  }
}

double sphere_coordinate_density(int dim, double x) {
  require(dim >= 2, "sphere_coordinate_density: dimension must be at least 2");
  require(std::abs(x) <= 1.0, "sphere_coordinate_density: |x| > 1");
  const double log_c = std::lgamma(0.5 * dim) - 0.5 * std::log(kTwoPi / 2) - std::lgamma(0.5 * (dim - 1));
  const double one_minus = 1.0 - x * x;
  if (one_minus == 0.0) {
    if (dim == 3) return std::exp(log_c);
    return dim > 3 ? 0.0 : std::numeric_limits<double>::infinity();
  }
  return std::exp(log_c + 0.5 * (dim - 3) * std::log(one_minus));
}

double sphere_coordinate_cdf(int dim, double x) {
  require(dim >= 2, "sphere_coordinate_cdf: dimension must be at least 2");
  if (x <= -1.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double shape = 0.5 * (dim - 1);
  return boost::math::ibeta(shape, shape, 0.5 * (1.0 + x));
}

double haar_marginal_density(int n, double x) {
  require(n >= 3, "haar_marginal_density: n must be at least 3");
  return sphere_coordinate_density(n, x);
}

double haar_marginal_cdf(int n, double x) {
  require(n >= 3, "haar_marginal_cdf: n must be at least 3");
  return sphere_coordinate_cdf(n, x);
}

double orthogonality_error(const Matrix& x) {
  return (x.transpose() * x - Matrix::Identity(x.cols(), x.cols())).norm();
}

Matrix reorthonormalize(const Matrix& x) {
  require(x.rows() == x.cols(), "reorthonormalize: matrix must be square");
  const double err = orthogonality_error(x);
  if (!(err < 0.1)) throw NumericError("reorthonormalize: input too far from orthogonal");
  if (x.determinant() < 0.0) throw NumericError("reorthonormalize: determinant is negative");
  // Newton-Schulz iteration for the polar factor; converges quadratically
  // from ||X^T X - I|| < 1 and leaves an orthogonal input unchanged.
  const Eigen::Index n = x.rows();
  const Matrix id = Matrix::Identity(n, n);
  Matrix q = x;
  for (int it = 0; it < 20; ++it) {
    const Matrix e = q.transpose() * q - id;
    if (e.norm() < 1e-15) break;
    q = q * (1.5 * id - 0.5 * (e + id));
  }
  return q;
}

}  // namespace kaclab
