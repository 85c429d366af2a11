#pragma once

// The endpoint of a walk as a function of perturbations injected at a set
// of marked times, its derivative, and the Jacobian matrices D and D_inf.

#include <vector>

#include "kaclab/son.hpp"
#include "kaclab/walk.hpp"

namespace kaclab {

/// Base point X, horizon T, marked times S (0-based, strictly increasing),
/// planes I and base angles eta (both of length T), and perturbation
/// half-width c. Perturbation coordinate l enters at time marked[l].
struct InducedMapSpec {
  Matrix base;
  int horizon = 0;
  std::vector<int> marked;
  std::vector<int> planes;
  std::vector<double> eta;
  double half_width = 0.05;

  int n() const { return static_cast<int>(base.rows()); }
  int dim() const { return static_cast<int>(marked.size()); }
};

void validate(const InducedMapSpec& spec);

/// Whether induced_map_eval rejects points outside [-c, c]^m. The Newton
/// solver needs to evaluate slightly outside the box.
enum class BoxPolicy { Enforce, Ignore };

/// f(x) = prod_{t=T-1..0} R(i_t, eta_t + [t = s_l] x_l) X.
Matrix induced_map_eval(const InducedMapSpec& spec, const Vector& x,
                        BoxPolicy policy = BoxPolicy::Enforce);

/// The update sequence the map applies at x (angles wrapped to [0, 2pi)).
UpdateSequence perturbed_updates(const InducedMapSpec& spec, const Vector& x);

struct Block {
  Matrix R;      ///< product of the unmarked rotations since the previous marked time
  double theta;  ///< base angle at the marked time
  int plane;     ///< plane index at the marked time
  Matrix b;      ///< generator sqrt(2) a_plane, so that R(plane, t) = exp(t b)
};

/// f(x) = tail * E_m R_m ... E_1 R_1 * base with E_k = exp((theta_k + x_k) b_k).
struct BlockFactorization {
  std::vector<Block> blocks;
  Matrix tail;
  Matrix base;
};

BlockFactorization block_factorize(const InducedMapSpec& spec);
Matrix block_recompose(const BlockFactorization& bf, const Vector& x);

/// Ambient partial derivatives df/dx_j at x, one n x n matrix per coordinate.
std::vector<Matrix> partial_derivatives(const InducedMapSpec& spec, const Vector& x);

/// df_x(h) = sum_j h_j df/dx_j.
Matrix derivative_map(const InducedMapSpec& spec, const Vector& x, const Vector& h);

/// N x m matrix whose column j holds the a-basis coordinates of
/// f(x)^{-1} df/dx_j. Its Gram matrix equals the Hilbert-Schmidt Gram
/// matrix of the ambient partials.
Matrix tangent_coordinates(const InducedMapSpec& spec, const Vector& x);

/// G[i,j] = <df/dx_i, df/dx_j>_HS.
Matrix gram_matrix(const InducedMapSpec& spec, const Vector& x);

/// sqrt(det G). Throws NumericError("degenerate volume") when the
/// derivative is numerically rank deficient.
double gram_volume(const InducedMapSpec& spec, const Vector& x);

/// D[i,j] = -Tr[a_{g_i} C^T a_{g_j} C] at x = 0, where g are the marked
/// planes and C = R_j E_{j-1} R_{j-1} ... E_{i+1} R_{i+1} is built from the
/// blocks strictly between the two marked times. Unit diagonal; symmetric.
/// Satisfies gram_matrix(spec, 0) = 2 D.
Matrix d_matrix(const InducedMapSpec& spec);

/// D_inf[i,j] = -Tr[a_i P a_j P^{-1}], P = P_{i+1} ... P_j with
/// P_2, ..., P_N i.i.d. Haar (drawn in that order).
Matrix d_infinity(int n, Rng& rng);

/// Rank of the tangent-coordinate matrix of the t-step map with every step
/// perturbed, evaluated at probe; threshold 1e-8 relative to the largest
/// singular value.
int numerical_rank(const Matrix& x0, const UpdateSequence& prefix, const Vector& probe);

/// Number of singular values above rel_tol times the largest.
int numerical_rank(const Matrix& m, double rel_tol = 1e-8);

}  // namespace kaclab
