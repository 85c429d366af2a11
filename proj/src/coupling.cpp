#include "kaclab/coupling.hpp"

#include <cmath>

#include "kaclab/errors.hpp"

namespace kaclab {

const char* to_string(ScheduleFlavor f) { return f == ScheduleFlavor::Greedy ? "greedy" : "lazy"; }

ScheduleFlavor parse_flavor(const std::string& s) {
  if (s == "greedy") return ScheduleFlavor::Greedy;
  if (s == "lazy") return ScheduleFlavor::Lazy;
  throw DomainError("unknown schedule flavor '" + s + "' (expected greedy or lazy)");
}

int lazy_gap(int n, double Q) {
  require(n >= 2, "lazy_gap: n must be at least 2");
  require(Q > 0.0 && std::isfinite(Q), "lazy gap constant Q must be positive");
  const double g = std::ceil(Q * n * n * std::log(static_cast<double>(n)));
  require(g < 1e9, "lazy gap too large");
  return static_cast<int>(g);
}

ScheduleBuilder::ScheduleBuilder(int plane_total, ScheduleFlavor flavor, int gap, double Q)
    : plane_total_(plane_total), flavor_(flavor), gap_(gap), Q_(Q),
      seen_(static_cast<std::size_t>(plane_total) + 1, 0) {
  require(plane_total >= 1, "schedule needs at least one plane");
  marked_.reserve(static_cast<std::size_t>(plane_total));
}

ScheduleBuilder ScheduleBuilder::greedy(int plane_total) {
  return ScheduleBuilder(plane_total, ScheduleFlavor::Greedy);
}

ScheduleBuilder ScheduleBuilder::lazy(int n, double Q) {
  return ScheduleBuilder(plane_count(n), ScheduleFlavor::Lazy, lazy_gap(n, Q), Q);
}

bool ScheduleBuilder::push(int plane) {
  require(plane >= 1 && plane <= plane_total_, "schedule: plane index out of range");
  if (done()) return true;
  const std::int64_t t = t_++;
  if (flavor_ == ScheduleFlavor::Greedy) {
    if (!seen_[static_cast<std::size_t>(plane)]) {
      seen_[static_cast<std::size_t>(plane)] = 1;
      marked_.push_back(static_cast<int>(t));
    }
  } else {
    const int wanted = static_cast<int>(marked_.size()) + 1;
    const std::int64_t earliest = marked_.empty() ? 0 : marked_.back() + static_cast<std::int64_t>(gap_);
    if (plane == wanted && t >= earliest) marked_.push_back(static_cast<int>(t));
  }
  return done();
}

Schedule ScheduleBuilder::finish() const {
  if (!done())
    throw InsufficientCoverage("insufficient coverage: only " + std::to_string(marked_.size()) +
                               " of " + std::to_string(plane_total_) +
                               " marked times realized in " + std::to_string(t_) + " steps");
  Schedule s;
  s.marked = marked_;
  s.horizon = marked_.back() + 1;
  s.flavor = flavor_;
  s.Q = Q_;
  return s;
}

Schedule greedy_schedule_planes(const std::vector<int>& planes, int plane_total) {
  ScheduleBuilder b = ScheduleBuilder::greedy(plane_total);
  for (int p : planes)
    if (b.push(p)) break;
  return b.finish();
}

Schedule greedy_schedule(const std::vector<int>& planes, int n) {
  return greedy_schedule_planes(planes, plane_count(n));
}

Schedule lazy_schedule(const std::vector<int>& planes, int n, double Q) {
  ScheduleBuilder b = ScheduleBuilder::lazy(n, Q);
  for (int p : planes)
    if (b.push(p)) break;
  return b.finish();
}

double contractive_step(const Matrix& x, const Matrix& y, int plane, double eta_x) {
  require(x.rows() == y.rows() && x.cols() == y.cols(), "contractive_step: dimension mismatch");
  const Plane p = plane_to_axes(static_cast<int>(x.rows()), plane);
  const int k = p.k - 1;
  const int l = p.l - 1;
  // (1/sqrt 2) <P(X Y^T - I), a_i> = ((X Y^T)_kl - (X Y^T)_lk) / 2
  const double g = 0.5 * (x.row(k).dot(y.row(l)) - x.row(l).dot(y.row(k)));
  return wrap_angle(eta_x + g);
}

namespace {

ContractiveRun contractive_over(const Matrix& x0, const Matrix& y0, std::vector<int> planes,
                                std::vector<double> eta_x, double snap) {
  require(x0.rows() == y0.rows() && x0.cols() == y0.cols() && x0.rows() == x0.cols(),
          "coupled chains must have the same square dimension");
  ContractiveRun run;
  const std::size_t horizon = planes.size();
  run.trace.dist_scaffold.reserve(horizon + 1);
  run.eta_y.reserve(horizon);
  WalkState xs{x0, 0, 0};
  WalkState ys{y0, 0, 0};
  auto note = [&](std::int64_t t) {
    double d = (xs.X - ys.X).norm();
    if (!run.trace.coalesced && d <= snap) {
      ys.X = xs.X;
      d = 0.0;
      run.trace.coalesced = true;
      run.trace.step = t;
    }
    run.trace.dist_scaffold.push_back(d);
  };
  note(0);
  for (std::size_t t = 0; t < horizon; ++t) {
    const double ey = contractive_step(xs.X, ys.X, planes[t], eta_x[t]);
    run.eta_y.push_back(ey);
    const bool merged = run.trace.coalesced;
    step(xs, Update{planes[t], eta_x[t]});
    if (merged) {
      ys.X = xs.X;
    } else {
      step(ys, Update{planes[t], ey});
    }
    note(static_cast<std::int64_t>(t) + 1);
  }
  run.trace.dist_main = run.trace.dist_scaffold;
  run.planes = std::move(planes);
  run.eta_x = std::move(eta_x);
  run.x_final = xs.X;
  run.y_final = ys.X;
  return run;
}

}  // namespace

ContractiveRun run_contractive_coupling(const Matrix& x0, const Matrix& y0, std::int64_t horizon,
                                        Rng& rng, double snap) {
  require(horizon >= 0, "coupling horizon must be non-negative");
  const int n = static_cast<int>(x0.rows());
  require(n >= 2, "coupled chains need n >= 2");
  std::vector<int> planes;
  std::vector<double> eta;
  planes.reserve(static_cast<std::size_t>(horizon));
  eta.reserve(static_cast<std::size_t>(horizon));
  for (std::int64_t t = 0; t < horizon; ++t) {
    const Update u = random_update(n, rng);
    planes.push_back(u.plane);
    eta.push_back(u.theta);
  }
  return contractive_over(x0, y0, std::move(planes), std::move(eta), snap);
}

NMCoupling build_nm_coupling(const Matrix& x0, const Matrix& y0, double Q, double eps,
                             ScheduleFlavor flavor, Rng& rng) {
  const int n = static_cast<int>(x0.rows());
  require(n >= 2 && x0.cols() == n && y0.rows() == n && y0.cols() == n,
          "coupled base points must be n x n with n >= 2");
  require(eps > 0.0 && eps < kTwoPi / 2, "perturbation half-width must lie in (0, pi)");
  ScheduleBuilder builder = flavor == ScheduleFlavor::Lazy ? ScheduleBuilder::lazy(n, Q)
                                                           : ScheduleBuilder::greedy(plane_count(n));
  std::vector<int> planes;
  std::vector<double> eta;
  bool done = false;
  while (!done) {
    const Update u = random_update(n, rng);
    planes.push_back(u.plane);
    eta.push_back(u.theta);
    done = builder.push(u.plane);
  }
  NMCoupling c;
  c.schedule = builder.finish();
  ContractiveRun run = contractive_over(x0, y0, planes, eta, 0.0);

  c.spec_a.base = x0;
  c.spec_a.horizon = c.schedule.horizon;
  c.spec_a.marked = c.schedule.marked;
  c.spec_a.planes = run.planes;
  c.spec_a.eta = run.eta_x;
  c.spec_a.half_width = eps;
  c.spec_b = c.spec_a;
  c.spec_b.base = y0;
  c.spec_b.eta = run.eta_y;
  c.trace = std::move(run.trace);
  c.x_hat = run.x_final;
  c.y_hat = run.y_final;
  return c;
}

const char* to_string(InverseStatus s) {
  switch (s) {
    case InverseStatus::Converged: return "converged";
    case InverseStatus::NotConverged: return "not_converged";
    case InverseStatus::LeftBox: return "left_box";
    case InverseStatus::Singular: return "singular";
  }
  return "unknown";
}

InverseResult invert_induced_map(const InducedMapSpec& spec, const Matrix& target, const Vector& x0,
                                 const InverseOptions& opt) {
  require(target.rows() == spec.n() && target.cols() == spec.n(), "inverse target has wrong shape");
  require(x0.size() == spec.dim(), "initial guess has wrong length");
  InverseResult res;
  res.x = x0;
  const double box = opt.box_inflation * spec.half_width;
  for (int it = 0;; ++it) {
    res.iterations = it;
    const Matrix f = induced_map_eval(spec, res.x, BoxPolicy::Ignore);
    res.residual = (f - target).norm();
    if (!std::isfinite(res.residual)) {
      res.status = InverseStatus::NotConverged;
      return res;
    }
    if (res.residual <= opt.tolerance) {
      res.status = InverseStatus::Converged;
      return res;
    }
    if (spec.dim() > 0 && res.x.cwiseAbs().maxCoeff() > box) {
      res.status = InverseStatus::LeftBox;
      return res;
    }
    if (it >= opt.max_iterations || spec.dim() == 0) {
      res.status = InverseStatus::NotConverged;
      return res;
    }
    const Vector r = skew_coordinates(project_skew(f.transpose() * target));
    const Matrix j = tangent_coordinates(spec, res.x);
    Eigen::JacobiSVD<Matrix> svd(j, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Vector& s = svd.singularValues();
    if (s(s.size() - 1) < opt.singular_threshold) {
      res.status = InverseStatus::Singular;
      return res;
    }
    res.x += svd.solve(r);
  }
}

namespace {

Vector uniform_box(int m, double c, Rng& rng) {
  Vector v(m);
  for (int i = 0; i < m; ++i) v(i) = rng.uniform(-c, c);
  return v;
}

bool in_box(const Vector& x, double c) { return x.size() == 0 || x.cwiseAbs().maxCoeff() <= c; }

}  // namespace

CoalesceResult coalesce_attempt(const InducedMapSpec& a, const InducedMapSpec& b, Rng& rng,
                                const CoalesceOptions& opt) {
  validate(a);
  validate(b);
  require(a.n() == b.n() && a.horizon == b.horizon && a.marked == b.marked && a.planes == b.planes &&
              a.half_width == b.half_width,
          "coalesce_attempt: specs must share n, T, S, I and c");
  const int m = a.dim();
  const double c = a.half_width;
  CoalesceResult res;
  auto note_failure = [&](const InverseResult& inv) {
    if (inv.status == InverseStatus::NotConverged || inv.status == InverseStatus::Singular) {
      if (++res.solver_failures > opt.retry_budget)
        throw CouplingNumericsExhausted(
            "coupling numerics exhausted: " + std::to_string(res.solver_failures) +
            " solver failures (last status " + to_string(inv.status) + ", residual " +
            std::to_string(inv.residual) + ", after " + std::to_string(res.proposals) + " proposals)");
    }
  };

  res.dx = uniform_box(m, c, rng);
  const Matrix p = induced_map_eval(a, res.dx);
  const InverseResult inv = invert_induced_map(b, p, res.dx, opt.inverse);
  const double u = rng.uniform();
  note_failure(inv);
  if (inv.converged() && in_box(inv.x, c)) {
    const double ratio = gram_volume(a, res.dx) / gram_volume(b, inv.x);
    if (u < std::min(1.0, ratio)) {
      res.dy = inv.x;
      res.coalesced = true;
      return res;
    }
  }

  for (;;) {
    if (++res.proposals > opt.max_proposals)
      throw CouplingNumericsExhausted("coupling numerics exhausted: proposal cap reached");
    Vector cand = uniform_box(m, c, rng);
    const double v = rng.uniform();
    const Matrix q = induced_map_eval(b, cand);
    const InverseResult back = invert_induced_map(a, q, cand, opt.inverse);
    note_failure(back);
    double ratio = 0.0;
    if (back.converged() && in_box(back.x, c))
      ratio = gram_volume(b, cand) / gram_volume(a, back.x);
    if (v < std::max(0.0, 1.0 - ratio)) {
      res.dy = std::move(cand);
      return res;
    }
  }
}

void realize_main_trace(const NMCoupling& c, const CoalesceResult& r, CouplingTrace& trace) {
  const UpdateSequence ua = perturbed_updates(c.spec_a, r.dx);
  const UpdateSequence ub = perturbed_updates(c.spec_b, r.dy);
  trace.dist_main.clear();
  trace.dist_main.reserve(ua.size() + 1);
  WalkState xs{c.spec_a.base, 0, 0};
  WalkState ys{c.spec_b.base, 0, 0};
  trace.dist_main.push_back((xs.X - ys.X).norm());
  for (std::size_t t = 0; t < ua.size(); ++t) {
    step(xs, ua.items[t]);
    step(ys, ub.items[t]);
    trace.dist_main.push_back((xs.X - ys.X).norm());
  }
  trace.coalesced = r.coalesced;
  trace.step = r.coalesced ? static_cast<std::int64_t>(ua.size()) : -1;
  if (r.coalesced) trace.dist_main.back() = 0.0;
}

}  // namespace kaclab
