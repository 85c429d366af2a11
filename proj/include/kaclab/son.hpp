#pragma once

// Primitives for SO(n) and its Lie algebra so(n).
//
// Plane indices and matrix axes are 1-based on every public interface; the
// i-th plane is the i-th axis pair (k, l), k < l, in lexicographic order.

#include <Eigen/Dense>

#include "kaclab/rng.hpp"

namespace kaclab {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

struct Plane {
  int k = 1;
  int l = 2;
  friend bool operator==(const Plane&, const Plane&) = default;
};

/// N = n(n-1)/2.
int plane_count(int n);

Plane plane_to_axes(int n, int i);
int axes_to_plane(int n, int k, int l);

/// Reduces an angle to [0, 2pi).
double wrap_angle(double theta);

/// Distance on the circle R / 2piZ; result in [0, pi].
double angle_distance(double a, double b);

/// R(i, theta): cos on the (k,k), (l,l) diagonal, +sin at (k,l), -sin at (l,k).
Matrix rotation_matrix(int n, int i, double theta);

/// X <- R(i, theta) X, touching only rows k and l.
void apply_rotation_left(Matrix& x, int i, double theta);
Matrix rotated_left(Matrix x, int i, double theta);

/// a_i = (E_kl - E_lk) / sqrt(2); unit Hilbert-Schmidt norm.
Matrix basis_element(int n, int i);

double hs_inner(const Matrix& a, const Matrix& b);
double hs_norm(const Matrix& a);

/// Orthogonal projection onto so(n): (G - G^T) / 2.
Matrix project_skew(const Matrix& g);

/// Coordinates <A, a_i>_HS of a matrix in the basis {a_i}; length N.
/// For non-skew input this equals the coordinates of project_skew(A).
Vector skew_coordinates(const Matrix& a);
Matrix from_skew_coordinates(int n, const Vector& coords);

/// Matrix exponential of a skew-symmetric matrix by scaling and squaring.
Matrix mat_exp_skew(const Matrix& a);

/// Haar-distributed element of SO(n) (Gaussian QR with sign correction).
Matrix haar_sample(int n, Rng& rng);

/// Density of one coordinate of a uniform point on S^{dim-1}:
/// c (1 - x^2)^{(dim-3)/2}.
double sphere_coordinate_density(int dim, double x);
double sphere_coordinate_cdf(int dim, double x);

/// Marginal density of a single entry of a Haar matrix in SO(n), n >= 3.
double haar_marginal_density(int n, double x);
double haar_marginal_cdf(int n, double x);

/// ||X^T X - I||_F.
double orthogonality_error(const Matrix& x);

/// Nearest rotation via the polar factor. Inputs with ||X^T X - I||_F >= 0.1
/// or with negative determinant raise NumericError: a walk state can never
/// legitimately leave SO(n), so there is nothing sensible to correct to.
Matrix reorthonormalize(const Matrix& x);

}  // namespace kaclab
