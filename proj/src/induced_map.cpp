#include "kaclab/induced_map.hpp"

#include <cmath>
#include <string>

#include "kaclab/errors.hpp"

namespace kaclab {

namespace {

constexpr double kSqrt2 = 1.4142135623730950488016887242097;

void check_point(const InducedMapSpec& spec, const Vector& x, BoxPolicy policy) {
  require(x.size() == spec.dim(), "perturbation has " + std::to_string(x.size()) +
                                      " coordinates, expected " + std::to_string(spec.dim()));
  if (!x.allFinite()) throw NumericError("perturbation has non-finite coordinates");
  if (policy == BoxPolicy::Enforce && spec.dim() > 0)
    require(x.cwiseAbs().maxCoeff() <= spec.half_width, "perturbation outside [-c, c]^m");
}

// Angle applied at every time step for perturbation x.
std::vector<double> step_angles(const InducedMapSpec& spec, const Vector& x) {
  std::vector<double> angles(spec.eta);
  for (int l = 0; l < spec.dim(); ++l) angles[spec.marked[l]] += x(l);
  return angles;
}

// States right after each marked step, plus the final state.
struct MarkedStates {
  std::vector<Matrix> after;
  Matrix final_state;
};

MarkedStates marked_states(const InducedMapSpec& spec, const Vector& x) {
  const std::vector<double> angles = step_angles(spec, x);
  MarkedStates out;
  out.after.reserve(spec.marked.size());
  Matrix state = spec.base;
  std::size_t next = 0;
  for (int t = 0; t < spec.horizon; ++t) {
    apply_rotation_left(state, spec.planes[t], angles[t]);
    if (next < spec.marked.size() && spec.marked[next] == t) {
      out.after.push_back(state);
      ++next;
    }
  }
  out.final_state = std::move(state);
  return out;
}

// a-basis coordinates of P^T b_i P for the plane (k, l): with u = row k and
// v = row l of P this matrix is u v^T - v u^T.
void conjugated_generator_coordinates(const Matrix& p, int plane, Eigen::Ref<Vector> out) {
  const int n = static_cast<int>(p.rows());
  const Plane ax = plane_to_axes(n, plane);
  const auto u = p.row(ax.k - 1);
  const auto v = p.row(ax.l - 1);
  int idx = 0;
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b) out(idx++) = kSqrt2 * (u(a) * v(b) - v(a) * u(b));
}

}  // namespace

void validate(const InducedMapSpec& spec) {
  require(spec.base.rows() >= 2 && spec.base.rows() == spec.base.cols(),
          "induced map base point must be square with n >= 2");
  require(spec.horizon >= 0, "induced map horizon must be non-negative");
  require(static_cast<int>(spec.planes.size()) == spec.horizon &&
              static_cast<int>(spec.eta.size()) == spec.horizon,
          "induced map plane and angle sequences must have length T");
  require(spec.half_width > 0.0 && spec.half_width < kTwoPi / 2,
          "perturbation half-width must lie in (0, pi)");
  const int planes = plane_count(spec.n());
  for (int p : spec.planes) require(p >= 1 && p <= planes, "induced map plane index out of range");
  for (std::size_t l = 0; l < spec.marked.size(); ++l) {
    require(spec.marked[l] >= 0 && spec.marked[l] < spec.horizon, "marked time outside [0, T)");
    if (l > 0) require(spec.marked[l] > spec.marked[l - 1], "marked times must strictly increase");
  }
}

Matrix induced_map_eval(const InducedMapSpec& spec, const Vector& x, BoxPolicy policy) {
  check_point(spec, x, policy);
  const std::vector<double> angles = step_angles(spec, x);
  Matrix state = spec.base;
  for (int t = 0; t < spec.horizon; ++t) apply_rotation_left(state, spec.planes[t], angles[t]);
  return state;
}

UpdateSequence perturbed_updates(const InducedMapSpec& spec, const Vector& x) {
  check_point(spec, x, BoxPolicy::Ignore);
  const std::vector<double> angles = step_angles(spec, x);
  UpdateSequence seq;
  seq.n = spec.n();
  seq.items.reserve(angles.size());
  for (int t = 0; t < spec.horizon; ++t)
    seq.items.push_back(Update{spec.planes[t], wrap_angle(angles[t])});
  return seq;
}

BlockFactorization block_factorize(const InducedMapSpec& spec) {
  validate(spec);
  const int n = spec.n();
  BlockFactorization bf;
  bf.base = spec.base;
  Matrix run = Matrix::Identity(n, n);
  std::size_t next = 0;
  for (int t = 0; t < spec.horizon; ++t) {
    if (next < spec.marked.size() && spec.marked[next] == t) {
      Block blk;
      blk.R = run;
      blk.theta = spec.eta[t];
      blk.plane = spec.planes[t];
      blk.b = kSqrt2 * basis_element(n, blk.plane);
      bf.blocks.push_back(std::move(blk));
      run.setIdentity();
      ++next;
    } else {
      apply_rotation_left(run, spec.planes[t], spec.eta[t]);
    }
  }
  bf.tail = run;
  return bf;
}

Matrix block_recompose(const BlockFactorization& bf, const Vector& x) {
  require(x.size() == static_cast<Eigen::Index>(bf.blocks.size()),
          "block_recompose: wrong perturbation length");
  Matrix acc = bf.base;
  for (std::size_t k = 0; k < bf.blocks.size(); ++k) {
    const Block& blk = bf.blocks[k];
    acc = blk.R * acc;
    acc = mat_exp_skew((blk.theta + x(static_cast<Eigen::Index>(k))) * blk.b) * acc;
  }
  return bf.tail * acc;
}

std::vector<Matrix> partial_derivatives(const InducedMapSpec& spec, const Vector& x) {
  check_point(spec, x, BoxPolicy::Ignore);
  const MarkedStates ms = marked_states(spec, x);
  const int n = spec.n();
  std::vector<Matrix> out;
  out.reserve(ms.after.size());
  for (int j = 0; j < spec.dim(); ++j) {
    const Matrix b = kSqrt2 * basis_element(n, spec.planes[spec.marked[j]]);
    out.push_back(ms.final_state * ms.after[j].transpose() * b * ms.after[j]);
  }
  return out;
}

Matrix derivative_map(const InducedMapSpec& spec, const Vector& x, const Vector& h) {
  require(h.size() == spec.dim(), "derivative_map: direction has wrong length");
  const std::vector<Matrix> partials = partial_derivatives(spec, x);
  Matrix out = Matrix::Zero(spec.n(), spec.n());
  for (int j = 0; j < spec.dim(); ++j) out += h(j) * partials[j];
  return out;
}

Matrix tangent_coordinates(const InducedMapSpec& spec, const Vector& x) {
  check_point(spec, x, BoxPolicy::Ignore);
  const MarkedStates ms = marked_states(spec, x);
  Matrix j(plane_count(spec.n()), spec.dim());
  for (int c = 0; c < spec.dim(); ++c)
    conjugated_generator_coordinates(ms.after[c], spec.planes[spec.marked[c]], j.col(c));
  return j;
}

Matrix gram_matrix(const InducedMapSpec& spec, const Vector& x) {
  const Matrix j = tangent_coordinates(spec, x);
  return j.transpose() * j;
}

double gram_volume(const InducedMapSpec& spec, const Vector& x) {
  const Matrix j = tangent_coordinates(spec, x);
  if (j.cols() == 0) return 1.0;
  if (j.cols() > j.rows()) throw NumericError("degenerate volume: more coordinates than dimensions");
  Eigen::JacobiSVD<Matrix> svd(j);
  const Vector& s = svd.singularValues();
  if (!(s(0) > 0.0) || s(s.size() - 1) <= 1e-14 * s(0))
    throw NumericError("degenerate volume: derivative is rank deficient");
  double log_vol = 0.0;
  for (Eigen::Index i = 0; i < s.size(); ++i) log_vol += std::log(s(i));
  return std::exp(log_vol);
}

Matrix d_matrix(const InducedMapSpec& spec) {
  const BlockFactorization bf = block_factorize(spec);
  const int n = spec.n();
  const int m = static_cast<int>(bf.blocks.size());
  std::vector<Matrix> a(m), e(m);
  for (int k = 0; k < m; ++k) {
    a[k] = basis_element(n, bf.blocks[k].plane);
    e[k] = rotation_matrix(n, bf.blocks[k].plane, bf.blocks[k].theta);
  }
  Matrix d = Matrix::Identity(m, m);
  for (int i = 0; i < m; ++i) {
    Matrix c = Matrix::Identity(n, n);
    for (int j = i + 1; j < m; ++j) {
      // extend C from R_{j-1} ... to R_j E_{j-1} R_{j-1} ...
      if (j > i + 1) c = e[j - 1] * c;
      c = bf.blocks[j].R * c;
      const double v = -(a[i] * c.transpose() * a[j] * c).trace();
      d(i, j) = v;
      d(j, i) = v;
    }
  }
  return d;
}

Matrix d_infinity(int n, Rng& rng) {
  require(n >= 2, "d_infinity: n must be at least 2");
  const int big_n = plane_count(n);
  std::vector<Matrix> p(big_n + 1);
  for (int l = 2; l <= big_n; ++l) p[l] = haar_sample(n, rng);
  std::vector<Matrix> a(big_n + 1);
  for (int i = 1; i <= big_n; ++i) a[i] = basis_element(n, i);
  Matrix d = Matrix::Identity(big_n, big_n);
  for (int i = 1; i <= big_n; ++i) {
    Matrix prod = Matrix::Identity(n, n);
    for (int j = i + 1; j <= big_n; ++j) {
      prod = prod * p[j];
      const double v = -(a[i] * prod * a[j] * prod.transpose()).trace();
      d(i - 1, j - 1) = v;
      d(j - 1, i - 1) = v;
    }
  }
  return d;
}

int numerical_rank(const Matrix& m, double rel_tol) {
  if (m.size() == 0) return 0;
  Eigen::JacobiSVD<Matrix> svd(m);
  const Vector& s = svd.singularValues();
  if (!(s(0) > 0.0)) return 0;
  int r = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s(i) > rel_tol * s(0)) ++r;
  return r;
}

int numerical_rank(const Matrix& x0, const UpdateSequence& prefix, const Vector& probe) {
  validate(prefix);
  const int t = static_cast<int>(prefix.size());
  require(probe.size() == t, "numerical_rank: probe must have one coordinate per step");
  if (t == 0) return 0;
  InducedMapSpec spec;
  spec.base = x0;
  spec.horizon = t;
  spec.half_width = 3.0;
  for (int s = 0; s < t; ++s) {
    spec.marked.push_back(s);
    spec.planes.push_back(prefix.items[s].plane);
    spec.eta.push_back(prefix.items[s].theta);
  }
  validate(spec);
  return numerical_rank(tangent_coordinates(spec, probe));
}

}  // namespace kaclab
