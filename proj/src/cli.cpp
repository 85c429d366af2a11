#include "kaclab/cli.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "kaclab/coupling.hpp"
#include "kaclab/errors.hpp"
#include "kaclab/io.hpp"
#include "kaclab/parallel.hpp"
#include "kaclab/randmat.hpp"
#include "kaclab/stats.hpp"
#include "kaclab/walk.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace kaclab {

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string utc_now() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t tt = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&tt, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

/// Collects output files and writes manifest.json last.
class Outputs {
 public:
  Outputs(std::string dir, std::string command, json params, std::uint64_t seed)
      : dir_(std::move(dir)), command_(std::move(command)), params_(std::move(params)), seed_(seed),
        started_(utc_now()) {
    fs::create_directories(dir_);
  }

  void write(const std::string& name, const std::string& content) {
    const std::string path = (fs::path(dir_) / name).string();
    write_file(path, content);
    files_.push_back({{"file", name}, {"sha256", sha256_hex(content)}, {"bytes", content.size()}});
  }

  void finish(int exit_code) {
    json m{{"schema_version", kSchemaVersion},
           {"artifact_version", kArtifactVersion},
           {"command", command_},
           {"params", params_},
           {"seed", seed_},
           {"started_at", started_},
           {"finished_at", utc_now()},
           {"exit_code", exit_code},
           {"outputs", files_}};
    write_file((fs::path(dir_) / "manifest.json").string(), dump(m));
  }

 private:
  std::string dir_;
  std::string command_;
  json params_;
  std::uint64_t seed_;
  std::string started_;
  json files_ = json::array();
};

Matrix perturbed_copy(const Matrix& x, double distance, Rng& rng) {
  if (distance == 0.0) return x;
  const int n = static_cast<int>(x.rows());
  Vector c(plane_count(n));
  for (Eigen::Index i = 0; i < c.size(); ++i) c(i) = rng.normal();
  const Matrix a = from_skew_coordinates(n, c / c.norm());
  return x * mat_exp_skew(distance * a);
}

// ---------------------------------------------------------------- walk

struct WalkArgs {
  int n = 5;
  std::int64_t steps = 1000;
  std::int64_t replicates = 100;
  std::int64_t every = 0;
};

int cmd_walk(const WalkArgs& a, std::uint64_t seed, int threads, const std::string& out_dir, std::ostream& out) {
  require(a.n >= 2, "--n must be at least 2");
  require(a.steps >= 0, "--steps must be non-negative");
  require(a.replicates >= 100, "--replicates must be at least 100");
  json params{{"n", a.n}, {"steps", a.steps}, {"replicates", a.replicates}, {"every", a.every}};
  Outputs o(out_dir, "walk", params, seed);

  // chain 0: full trajectory summary and its update list
  const std::int64_t every = a.every > 0 ? a.every : std::max<std::int64_t>(1, a.steps / 1000);
  Rng rng = make_stream(seed, "walk", 0);
  const UpdateSequence seq = random_update_sequence(a.n, a.steps, rng);
  std::string traj = "t,x11,sphere_x1,orthogonality_error\n";
  WalkState st = WalkState::identity(a.n);
  auto row = [&]() {
    traj += std::to_string(st.t) + ',' + fmt_double(st.X(0, 0)) + ',' + fmt_double(sphere_projection(st)(0)) + ',' +
            fmt_double(orthogonality_error(st.X)) + '\n';
  };
  row();
  for (const Update& u : seq.items) {
    step(st, u);
    if (st.t % every == 0 || st.t == a.steps) row();
  }
  o.write("trajectory.csv", traj);
  if (a.steps <= 1000000) o.write("updates.csv", update_csv(seq));

  const TvProxy tv = tv_proxy(a.n, a.steps, a.replicates, seed, threads);
  std::string tv_csv = "replicate,x11\n";
  for (std::size_t r = 0; r < tv.entries.size(); ++r) tv_csv += std::to_string(r) + ',' + fmt_double(tv.entries[r]) + '\n';
  o.write("tv_samples.csv", tv_csv);
  json tvj{{"schema_version", kSchemaVersion}, {"n", a.n}, {"T", a.steps}, {"replicates", a.replicates},
           {"ks_x11_vs_haar", tv.ks}, {"rank_deficient", tv.rank_deficient}, {"N", plane_count(a.n)}};
  o.write("tv_proxy.json", dump(tvj));
  o.finish(kExitOk);
  out << "walk: n=" << a.n << " T=" << a.steps << " ks=" << fmt_double(tv.ks)
      << " rank_deficient=" << (tv.rank_deficient ? "true" : "false") << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------- couple

struct CoupleArgs {
  int n = 3;
  std::string flavor = "lazy";
  double Q = 1.0;
  double eps = 0.05;
  std::int64_t replicates = 100;
  double init_dist = 1e-6;
  std::int64_t traces = 1;
};

struct CoupleReplicate {
  int horizon = 0;
  bool coalesced = false;
  double scaffold_final = 0.0;
  double initial = 0.0;
  int failures = 0;
  std::int64_t proposals = 0;
  std::string error;
  CouplingTrace trace;
  std::string spec_a;
};

int cmd_couple(const CoupleArgs& a, std::uint64_t seed, int threads, const std::string& out_dir, std::ostream& out,
               std::ostream& err) {
  require(a.n >= 2, "--n must be at least 2");
  require(a.eps > 0.0 && a.eps < kTwoPi / 2, "--eps must lie in (0, pi)");
  require(a.Q > 0.0, "--Q must be positive");
  require(a.replicates >= 1, "--replicates must be positive");
  require(a.init_dist >= 0.0, "--init-dist must be non-negative");
  const ScheduleFlavor flavor = parse_flavor(a.flavor);
  json params{{"n", a.n}, {"flavor", a.flavor}, {"Q", a.Q}, {"eps", a.eps}, {"replicates", a.replicates},
              {"init_dist", a.init_dist}, {"traces", a.traces}};
  Outputs o(out_dir, "couple", params, seed);

  const auto reps = parallel_map(
      a.replicates,
      [&](std::int64_t r) {
        CoupleReplicate out_r;
        Rng rng = make_stream(seed, "couple", static_cast<std::uint64_t>(r));
        const Matrix x0 = haar_sample(a.n, rng);
        const Matrix y0 = perturbed_copy(x0, a.init_dist, rng);
        out_r.initial = (x0 - y0).norm();
        try {
          NMCoupling c = build_nm_coupling(x0, y0, a.Q, a.eps, flavor, rng);
          out_r.horizon = c.schedule.horizon;
          out_r.scaffold_final = c.trace.dist_scaffold.back();
          const CoalesceResult res = coalesce_attempt(c.spec_a, c.spec_b, rng);
          out_r.coalesced = res.coalesced;
          out_r.failures = res.solver_failures;
          out_r.proposals = res.proposals;
          if (r < a.traces) {
            out_r.trace = c.trace;
            realize_main_trace(c, res, out_r.trace);
          }
          if (r == 0) out_r.spec_a = dump(spec_to_json(c.spec_a));
        } catch (const CouplingNumericsExhausted& e) {
          out_r.error = e.what();
        } catch (const NumericError& e) {
          out_r.error = e.what();
        }
        return out_r;
      },
      threads);

  std::string table = "replicate,T,initial_dist,scaffold_final,coalesced,solver_failures,proposals,error\n";
  std::int64_t coalesced = 0, failed = 0, total_failures = 0;
  for (std::size_t r = 0; r < reps.size(); ++r) {
    const CoupleReplicate& c = reps[r];
    table += std::to_string(r) + ',' + std::to_string(c.horizon) + ',' + fmt_double(c.initial) + ',' +
             fmt_double(c.scaffold_final) + ',' + (c.coalesced ? "1" : "0") + ',' + std::to_string(c.failures) + ',' +
             std::to_string(c.proposals) + ',' + (c.error.empty() ? "" : "numerics_exhausted") + '\n';
    coalesced += c.coalesced ? 1 : 0;
    failed += c.error.empty() ? 0 : 1;
    total_failures += c.failures;
    if (static_cast<std::int64_t>(r) < a.traces && c.error.empty())
      o.write("trace_" + std::to_string(r) + ".csv", trace_csv(c.trace));
  }
  o.write("coalescence.csv", table);
  if (!reps.empty() && !reps[0].spec_a.empty()) o.write("spec_a_0.json", reps[0].spec_a);
  const double rate = static_cast<double>(coalesced) / static_cast<double>(a.replicates);
  json summary{{"schema_version", kSchemaVersion}, {"replicates", a.replicates}, {"coalesced", coalesced},
               {"coalescence_rate", rate}, {"numerics_exhausted_replicates", failed},
               {"solver_failures_total", total_failures}};
  o.write("summary.json", dump(summary));
  const int code = failed > 0 ? kExitNumeric : kExitOk;
  o.finish(code);
  out << "couple: coalescence_rate=" << fmt_double(rate) << " (" << coalesced << "/" << a.replicates << ")\n";
  if (failed > 0) {
    err << "couple: coupling numerics exhausted in " << failed << " replicate(s):";
    for (std::size_t r = 0; r < reps.size(); ++r)
      if (!reps[r].error.empty()) err << " " << r << " (" << reps[r].failures << " solver failures)";
    err << "\n";
  }
  return code;
}

// ---------------------------------------------------------------- phi

struct PhiArgs {
  int n = 3;
  std::string flavor = "dinf";
  double Q = 1.0;
  std::int64_t samples = 1000;
  double C = 1000.0;
};

int cmd_phi(const PhiArgs& a, std::uint64_t seed, int threads, const std::string& out_dir, std::ostream& out) {
  require(a.n >= 2, "--n must be at least 2");
  require(a.samples >= 100, "--samples must be at least 100");
  require(a.Q > 0.0 && a.C > 0.0, "--Q and --C must be positive");
  const JacobianFlavor flavor = parse_jacobian_flavor(a.flavor);
  json params{{"n", a.n}, {"flavor", a.flavor}, {"Q", a.Q}, {"samples", a.samples}, {"C", a.C}};
  Outputs o(out_dir, "phi", params, seed);
  const PhiResult p = phi_estimate(a.n, a.Q, flavor, a.samples, seed, threads);
  std::string csv = "sample,sigma1\n";
  for (std::size_t r = 0; r < p.sigma1.size(); ++r) csv += std::to_string(r) + ',' + fmt_double(p.sigma1[r]) + '\n';
  o.write("sigma1.csv", csv);
  json report{{"schema_version", kSchemaVersion}, {"phi", to_json(p)},
              {"mixing_bound", to_json(mixing_bound_report(a.n, p.capped, a.C, a.Q))}};
  if (p.uncapped.point > 0.0 && p.uncapped.point < 1.0)
    report["mixing_bound_uncapped"] = to_json(mixing_bound_report(a.n, p.uncapped.point, a.C, a.Q));
  o.write("phi.json", dump(report));
  o.finish(kExitOk);
  out << "phi: n=" << a.n << " flavor=" << a.flavor << " uncapped=" << fmt_double(p.uncapped.point)
      << " capped=" << fmt_double(p.capped) << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------- verify

InequalityReport negated_telescoping(std::int64_t trials, std::uint64_t seed) {
  // Harness self-test: the reversed inequality fails on generic inputs.
  InequalityReport r;
  r.lemma = "self_test_fault";
  r.trials = trials;
  r.worst_slack = std::numeric_limits<double>::infinity();
  for (std::int64_t t = 0; t < trials; ++t) {
    Rng rng = make_stream(seed, "self_test_fault", static_cast<std::uint64_t>(t));
    std::vector<Matrix> p{haar_sample(3, rng), haar_sample(3, rng)};
    std::vector<Matrix> q{haar_sample(3, rng), haar_sample(3, rng)};
    const double slack = -telescoping_gap(p, q);
    if (slack < -1e-10) ++r.violations;
    r.worst_slack = std::min(r.worst_slack, slack);
  }
  r.params = {{"note", "telescoping inequality with its direction reversed"}};
  return r;
}

int cmd_verify(const std::vector<std::string>& only, std::int64_t trials, bool fault, std::uint64_t seed, int threads,
               const std::string& out_dir, std::ostream& out, std::ostream& err) {
  require(trials >= 1, "--trials must be positive");
  std::vector<std::string> names;
  for (const std::string& item : only) {
    std::stringstream ss(item);
    std::string name;
    while (std::getline(ss, name, ','))
      if (!name.empty()) names.push_back(name);
  }
  for (const std::string& n : names) {
    const auto& all = lemma_names();
    if (std::find(all.begin(), all.end(), n) == all.end()) throw UsageError("unknown lemma '" + n + "'");
  }
  if (names.empty()) names = lemma_names();
  json params{{"only", names}, {"trials", trials}, {"self_test_fault", fault}};
  Outputs o(out_dir, "verify", params, seed);
  std::vector<InequalityReport> reports;
  for (const std::string& n : names) reports.push_back(run_lemma(n, trials, seed, threads));
  if (fault) reports.push_back(negated_telescoping(std::min<std::int64_t>(trials, 100), seed));
  json summary{{"schema_version", kSchemaVersion}, {"reports", json::array()}};
  std::vector<std::string> failed;
  for (const InequalityReport& r : reports) {
    o.write("report_" + r.lemma + ".json", dump(to_json(r)));
    summary["reports"].push_back({{"lemma", r.lemma}, {"trials", r.trials}, {"violations", r.violations},
                                  {"worst_slack", r.worst_slack}});
    out << "verify: " << r.lemma << " trials=" << r.trials << " violations=" << r.violations
        << " worst_slack=" << fmt_double(r.worst_slack) << "\n";
    if (!r.passed()) failed.push_back(r.lemma);
  }
  summary["failed"] = failed;
  o.write("verify_summary.json", dump(summary));
  const int code = failed.empty() ? kExitOk : kExitVerificationFailed;
  o.finish(code);
  if (!failed.empty()) {
    err << "verify: violations in";
    for (const auto& f : failed) err << " " << f;
    err << "\n";
  }
  return code;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Kac walk on SO(n): simulation and verification lab", "kaclab"};
  app.require_subcommand(1);
  std::uint64_t seed = 1;
  int threads = 0;
  std::string out_dir = "kaclab_out";
  auto common = [&](CLI::App* sub) {
    sub->add_option("--seed", seed, "master seed");
    sub->add_option("--threads", threads, "worker threads (default: KACLAB_THREADS or OpenMP default)");
    sub->add_option("--out", out_dir, "output directory");
  };

  WalkArgs wa;
  CLI::App* walk = app.add_subcommand("walk", "run walks and the total-variation proxy");
  walk->add_option("--n", wa.n, "dimension");
  walk->add_option("--steps", wa.steps, "steps per walk");
  walk->add_option("--replicates", wa.replicates, "independent walks for the proxy (>= 100)");
  walk->add_option("--every", wa.every, "trajectory sampling interval (default steps/1000)");
  common(walk);

  CoupleArgs ca;
  CLI::App* couple = app.add_subcommand("couple", "two-stage coupling with coalescence attempts");
  couple->add_option("--n", ca.n, "dimension");
  couple->add_option("--flavor", ca.flavor, "schedule: greedy or lazy");
  couple->add_option("--Q", ca.Q, "lazy gap constant");
  couple->add_option("--eps", ca.eps, "perturbation half-width in (0, pi)");
  couple->add_option("--replicates", ca.replicates, "coupled pairs");
  couple->add_option("--init-dist", ca.init_dist, "initial Hilbert-Schmidt distance (0 for identical starts)");
  couple->add_option("--traces", ca.traces, "number of replicates whose distance traces are written");
  common(couple);

  PhiArgs pa;
  CLI::App* phi = app.add_subcommand("phi", "estimate the smallest-singular-value quantile and bounds");
  phi->add_option("--n", pa.n, "dimension");
  phi->add_option("--flavor", pa.flavor, "d or dinf");
  phi->add_option("--Q", pa.Q, "lazy gap constant for flavor d");
  phi->add_option("--samples", pa.samples, "matrices to sample (>= 100)");
  phi->add_option("--C", pa.C, "constant of the phi-based bound (not rigorous)");
  common(phi);

  std::vector<std::string> only;
  std::int64_t trials = 1000;
  bool fault = false;
  CLI::App* verify = app.add_subcommand("verify", "run the inequality oracle suite");
  verify->add_option("--only", only, "comma-separated lemma names");
  verify->add_option("--trials", trials, "trials per configuration");
  verify->add_flag("--self-test-fault", fault, "")->group("");
  common(verify);

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "kaclab: " << e.what() << "\n" << app.help();
    return kExitUsage;
  }

  try {
    if (*walk) return cmd_walk(wa, seed, threads, out_dir, out);
    if (*couple) return cmd_couple(ca, seed, threads, out_dir, out, err);
    if (*phi) return cmd_phi(pa, seed, threads, out_dir, out);
    if (*verify) return cmd_verify(only, trials, fault, seed, threads, out_dir, out, err);
  } catch (const UsageError& e) {
    err << "kaclab: " << e.what() << "\n";
    return kExitUsage;
  } catch (const DomainError& e) {
    err << "kaclab: " << e.what() << "\n";
    return kExitUsage;
  } catch (const CouplingNumericsExhausted& e) {
    err << "kaclab: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const NumericError& e) {
    err << "kaclab: numeric failure: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const std::exception& e) {
    err << "kaclab: " << e.what() << "\n";
    return kExitNumeric;
  }
  return kExitUsage;
}

int run_cli(int argc, char** argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run_cli(args, std::cout, std::cerr);
}

}  // namespace kaclab
