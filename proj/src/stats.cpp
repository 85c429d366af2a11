#include "kaclab/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <boost/math/distributions/binomial.hpp>
#include <boost/math/distributions/chi_squared.hpp>

#include "kaclab/errors.hpp"
#include "kaclab/parallel.hpp"
#include "kaclab/walk.hpp"

namespace kaclab {

double ks_statistic(std::vector<double> samples, const std::function<double(double)>& cdf) {
  require(!samples.empty(), "ks_statistic: empty sample");
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  std::size_t i = 0;
  while (i < samples.size()) {
    // handle ties: the empirical CDF jumps once per distinct value
    std::size_t j = i;
    while (j < samples.size() && samples[j] == samples[i]) ++j;
    const double f = cdf(samples[i]);
    d = std::max({d, std::abs(f - static_cast<double>(i) / n), std::abs(static_cast<double>(j) / n - f)});
    i = j;
  }
  return std::min(d, 1.0);
}

double ks_two_sample(std::vector<double> a, std::vector<double> b) {
  require(!a.empty() && !b.empty(), "ks_two_sample: empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double v = std::min(a[i], b[j]);
    while (i < a.size() && a[i] == v) ++i;
    while (j < b.size() && b[j] == v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return d;
}

double ks_two_sample_critical95(std::size_t n, std::size_t m) {
  const double dn = static_cast<double>(n);
  const double dm = static_cast<double>(m);
  return 1.358 * std::sqrt((dn + dm) / (dn * dm));
}

QuantileEstimate quantile_estimate(std::vector<double> samples, double level, double confidence) {
  require(level > 0.0 && level < 1.0, "quantile level must lie in (0, 1)");
  require(confidence > 0.0 && confidence < 1.0, "confidence must lie in (0, 1)");
  require(!samples.empty(), "quantile_estimate: empty sample");
  std::sort(samples.begin(), samples.end());
  const auto n = static_cast<std::int64_t>(samples.size());
  const double alpha = 1.0 - confidence;
  boost::math::binomial_distribution<double> bin(static_cast<double>(n), level);

  // P[x_(k) <= xi_q] = P[Bin(n, q) >= k].
  auto below = [&](std::int64_t k) { return boost::math::cdf(bin, static_cast<double>(k - 1)); };
  require(below(1) <= alpha / 2,
          "insufficient samples for a lower confidence bound at this level");
  require(below(n) >= 1.0 - alpha / 2,
          "insufficient samples for an upper confidence bound at this level");
  std::int64_t lo = 1;
  while (lo + 1 <= n && below(lo + 1) <= alpha / 2) ++lo;
  std::int64_t hi = n;
  while (hi - 1 >= 1 && below(hi - 1) >= 1.0 - alpha / 2) --hi;

  std::int64_t k = static_cast<std::int64_t>(std::ceil(level * static_cast<double>(n)));
  k = std::clamp<std::int64_t>(k, 1, n);
  QuantileEstimate q;
  q.level = level;
  q.confidence = confidence;
  q.samples = n;
  q.point = samples[static_cast<std::size_t>(k - 1)];
  q.lower = std::min(samples[static_cast<std::size_t>(lo - 1)], q.point);
  q.upper = std::max(samples[static_cast<std::size_t>(hi - 1)], q.point);
  return q;
}

ContractionFit contraction_fit(const std::vector<double>& distances) {
  std::vector<double> ts, ys;
  for (std::size_t t = 0; t < distances.size(); ++t) {
    if (!(distances[t] > 0.0)) break;
    ts.push_back(static_cast<double>(t));
    ys.push_back(std::log(distances[t]));
  }
  require(std::any_of(distances.begin(), distances.end(), [](double d) { return d > 0.0; }),
          "contraction_fit: all distances are zero");
  require(ts.size() >= 10, "contraction_fit: fewer than 10 positive distances in the prefix");
  const double m = static_cast<double>(ts.size());
  const double tbar = std::accumulate(ts.begin(), ts.end(), 0.0) / m;
  const double ybar = std::accumulate(ys.begin(), ys.end(), 0.0) / m;
  double stt = 0.0, sty = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    stt += (ts[i] - tbar) * (ts[i] - tbar);
    sty += (ts[i] - tbar) * (ys[i] - ybar);
    syy += (ys[i] - ybar) * (ys[i] - ybar);
  }
  ContractionFit fit;
  fit.points = static_cast<std::int64_t>(ts.size());
  fit.slope = sty / stt;
  fit.intercept = ybar - fit.slope * tbar;
  double sse = 0.0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    const double r = ys[i] - (fit.intercept + fit.slope * ts[i]);
    sse += r * r;
  }
  fit.r2 = syy > 0.0 ? 1.0 - sse / syy : 1.0;
  return fit;
}

double greedy_mean_oracle(int plane_total) {
  double h = 0.0;
  for (int k = 1; k <= plane_total; ++k) h += 1.0 / k;
  return plane_total * h - 1.0;
}

namespace {

struct TrialOutcome {
  int last = 0;
  std::vector<int> waits;
};

void summarize(ScheduleTimeStats& st, const std::vector<TrialOutcome>& trials) {
  st.trials = static_cast<std::int64_t>(trials.size());
  double sum = 0.0;
  for (const auto& t : trials) {
    st.last_times.push_back(t.last);
    sum += t.last;
    st.waits.insert(st.waits.end(), t.waits.begin(), t.waits.end());
  }
  st.mean = sum / static_cast<double>(st.trials);
  double ss = 0.0;
  for (int v : st.last_times) ss += (v - st.mean) * (v - st.mean);
  st.variance = st.trials > 1 ? ss / static_cast<double>(st.trials - 1) : 0.0;
  st.std_error = std::sqrt(st.variance / static_cast<double>(st.trials));
}

void add_gumbel(ScheduleTimeStats& st) {
  const double big_n = st.plane_total;
  const double center = big_n * std::log(big_n);
  for (double c : gumbel_grid()) {
    std::int64_t hits = 0;
    for (int v : st.last_times)
      if ((v - center) / big_n <= c) ++hits;
    st.gumbel.push_back(CdfPoint{c, static_cast<double>(hits) / static_cast<double>(st.trials),
                                 std::exp(-std::exp(-c))});
  }
}

}  // namespace

ScheduleTimeStats greedy_time_stats_planes(int plane_total, std::int64_t trials, std::uint64_t seed,
                                           int threads) {
  require(trials >= 100, "schedule statistics need at least 100 trials");
  require(plane_total >= 1, "plane alphabet must be non-empty");
  auto outcomes = parallel_map(
      trials,
      [&](std::int64_t r) {
        Rng rng = make_stream(seed, "schedule", static_cast<std::uint64_t>(r));
        ScheduleBuilder b = ScheduleBuilder::greedy(plane_total);
        while (!b.push(rng.uniform_int(1, plane_total))) {
        }
        return TrialOutcome{b.finish().marked.back(), {}};
      },
      threads);
  ScheduleTimeStats st;
  st.flavor = ScheduleFlavor::Greedy;
  st.plane_total = plane_total;
  summarize(st, outcomes);
  add_gumbel(st);
  return st;
}

ScheduleTimeStats schedule_time_stats(ScheduleFlavor flavor, int n, double Q, std::int64_t trials,
                                      std::uint64_t seed, int threads) {
  require(n >= 2, "schedule statistics need n >= 2");
  if (flavor == ScheduleFlavor::Greedy) return greedy_time_stats_planes(plane_count(n), trials, seed, threads);
  require(trials >= 100, "schedule statistics need at least 100 trials");
  const int big_n = plane_count(n);
  const int gap = lazy_gap(n, Q);
  auto outcomes = parallel_map(
      trials,
      [&](std::int64_t r) {
        Rng rng = make_stream(seed, "schedule", static_cast<std::uint64_t>(r));
        ScheduleBuilder b = ScheduleBuilder::lazy(n, Q);
        while (!b.push(rng.uniform_int(1, big_n))) {
        }
        const Schedule s = b.finish();
        TrialOutcome out;
        out.last = s.marked.back();
        std::int64_t earliest = 0;
        for (int m : s.marked) {
          out.waits.push_back(static_cast<int>(m - earliest));
          earliest = m + gap;
        }
        return out;
      },
      threads);
  ScheduleTimeStats st;
  st.flavor = flavor;
  st.plane_total = big_n;
  st.gap = gap;
  summarize(st, outcomes);
  return st;
}

ChiSquareResult chi_square_geometric(const std::vector<int>& samples, double p) {
  require(p > 0.0 && p < 1.0, "geometric success probability must lie in (0, 1)");
  require(!samples.empty(), "chi_square_geometric: empty sample");
  const double total = static_cast<double>(samples.size());
  int max_v = 0;
  for (int v : samples) {
    require(v >= 0, "geometric samples must be non-negative");
    max_v = std::max(max_v, v);
  }
  std::vector<double> counts(static_cast<std::size_t>(max_v) + 1, 0.0);
  for (int v : samples) counts[static_cast<std::size_t>(v)] += 1.0;

  // bins {0}, {1}, ..., {K-1}, [K, inf): singletons while both the singleton
  // and the remaining tail keep expected count >= 5
  std::vector<double> obs, expct;
  int k = 0;
  double tail_prob = 1.0;
  for (;;) {
    const double pk = p * std::pow(1.0 - p, k);
    if (total * pk < 5.0 || total * (tail_prob - pk) < 5.0) break;
    obs.push_back(k <= max_v ? counts[static_cast<std::size_t>(k)] : 0.0);
    expct.push_back(total * pk);
    tail_prob -= pk;
    ++k;
  }
  double tail_obs = 0.0;
  for (int v = k; v <= max_v; ++v) tail_obs += counts[static_cast<std::size_t>(v)];
  obs.push_back(tail_obs);
  expct.push_back(total * tail_prob);

  ChiSquareResult res;
  res.bins = static_cast<int>(obs.size());
  for (std::size_t i = 0; i < obs.size(); ++i)
    res.statistic += (obs[i] - expct[i]) * (obs[i] - expct[i]) / expct[i];
  res.dof = res.bins - 1;
  if (res.dof >= 1) {
    boost::math::chi_squared_distribution<double> chi(res.dof);
    res.p_value = boost::math::cdf(boost::math::complement(chi, res.statistic));
  } else {
    res.p_value = 1.0;
  }
  return res;
}

TvProxy tv_proxy(int n, std::int64_t horizon, std::int64_t replicates, std::uint64_t seed, int threads) {
  require(n >= 2, "tv_proxy: n must be at least 2");
  require(horizon >= 0, "tv_proxy: horizon must be non-negative");
  require(replicates >= 100, "tv_proxy: at least 100 replicates required");
  TvProxy out;
  out.entries = parallel_map(
      replicates,
      [&](std::int64_t r) {
        Rng rng = make_stream(seed, "tv_proxy", static_cast<std::uint64_t>(r));
        WalkState st = WalkState::identity(n);
        for (std::int64_t t = 0; t < horizon; ++t) step(st, random_update(n, rng));
        return st.X(0, 0);
      },
      threads);
  out.ks = ks_statistic(out.entries, [n](double x) { return sphere_coordinate_cdf(n, x); });
  out.rank_deficient = horizon < plane_count(n);
  return out;
}

MixingBoundReport mixing_bound_report(int n, double phi, double C, double Q) {
  require(n >= 2, "mixing_bound_report: n must be at least 2");
  require(phi > 0.0 && phi < 1.0, "mixing_bound_report: phi must lie in (0, 1)");
  require(C > 0.0 && Q > 0.0, "mixing_bound_report: constants must be positive");
  const double dn = n;
  const double ln_n = std::log(dn);
  MixingBoundReport r;
  r.n = n;
  r.phi = phi;
  r.C = C;
  r.Q = Q;
  r.lower_bound_steps = plane_count(n);
  r.headline_upper_steps = 1e7 * std::pow(dn, 4) * ln_n;
  r.phi_based_upper = C * dn * dn * std::log(dn / phi);
  r.intermediate_upper = 8.0 * Q * std::pow(dn, 4) * ln_n + 5.0 * dn * dn * ln_n +
                         900.0 * dn * dn * std::log(1.0 / phi);
  r.notes = {
      "lower_bound_steps: the chain is supported on a null set before N steps",
      "headline_upper_steps: 1e7 n^4 ln n, an asymptotic statement, not a measured quantity",
      "phi_based_upper: C is a free constant with no rigorous value; the log is taken as ln(n/phi), "
      "one reading of the n^2 log(n phi_n) and n^2 log(phi_n) normalizations, both of which are "
      "negative for small phi",
      "intermediate_upper: uses ln(1/phi) where the displayed formula has log(phi_n), which is "
      "negative; interpretation, not a proved constant",
  };
  return r;
}

}  // namespace kaclab
