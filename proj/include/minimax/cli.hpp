#pragma once

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "minimax/bounds.hpp"
#include "minimax/dataio.hpp"
#include "minimax/errors.hpp"
#include "minimax/optimizers.hpp"
#include "minimax/risk.hpp"
#include "minimax/stability.hpp"

namespace minimax {
namespace cli {

/// Flat key=value configuration with dotted keys. Files hold one pair per
/// line ('#' comments allowed); command-line pairs override file entries.
class KvMap {
 public:
  void set(const std::string& key, const std::string& value) {
    kv_[key] = value;
  }

  void load_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot open config file", path);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      const std::size_t first = line.find_first_not_of(" \t\r");
      if (first == std::string::npos || line[first] == '#') continue;
      const std::size_t eq = line.find('=');
      if (eq == std::string::npos)
        throw config_error("config line " + std::to_string(line_no) +
                           ": expected key=value, got '" + line + "'");
      set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
  }

  void apply_override(const std::string& pair) {
    const std::size_t eq = pair.find('=');
    if (eq == std::string::npos)
      throw config_error("override '" + pair + "': expected key=value");
    set(trim(pair.substr(0, eq)), trim(pair.substr(eq + 1)));
  }

  bool has(const std::string& key) const { return kv_.count(key) > 0; }

  std::string get_str(const std::string& key,
                      std::optional<std::string> fallback = {}) const {
    const auto it = kv_.find(key);
    if (it != kv_.end()) return it->second;
    if (fallback) return *fallback;
    throw config_error("missing required config key '" + key + "'");
  }

  double get_real(const std::string& key,
                  std::optional<double> fallback = {}) const {
    const auto it = kv_.find(key);
    if (it == kv_.end()) {
      if (fallback) return *fallback;
      throw config_error("missing required config key '" + key + "'");
    }
    try {
      std::size_t used = 0;
      const double v = std::stod(it->second, &used);
      if (used != it->second.size()) throw std::invalid_argument(it->second);
      return v;
    } catch (const std::exception&) {
      throw config_error("config key '" + key + "': not a number: '" +
                         it->second + "'");
    }
  }

  long get_int(const std::string& key, std::optional<long> fallback = {}) const {
    const auto it = kv_.find(key);
    if (it == kv_.end()) {
      if (fallback) return *fallback;
      throw config_error("missing required config key '" + key + "'");
    }
    try {
      std::size_t used = 0;
      const long v = std::stol(it->second, &used);
      if (used != it->second.size()) throw std::invalid_argument(it->second);
      return v;
    } catch (const std::exception&) {
      throw config_error("config key '" + key + "': not an integer: '" +
                         it->second + "'");
    }
  }

  std::uint64_t get_u64(const std::string& key,
                        std::optional<std::uint64_t> fallback = {}) const {
    const auto it = kv_.find(key);
    if (it == kv_.end()) {
      if (fallback) return *fallback;
      throw config_error("missing required config key '" + key + "'");
    }
    try {
      std::size_t used = 0;
      const unsigned long long v = std::stoull(it->second, &used);
      if (used != it->second.size()) throw std::invalid_argument(it->second);
      return v;
    } catch (const std::exception&) {
      throw config_error("config key '" + key + "': not an unsigned integer: '" +
                         it->second + "'");
    }
  }

  bool get_flag(const std::string& key, bool fallback) const {
    const auto it = kv_.find(key);
    if (it == kv_.end()) return fallback;
    if (it->second == "1" || it->second == "true") return true;
    if (it->second == "0" || it->second == "false") return false;
    throw config_error("config key '" + key + "': expected 0/1, got '" +
                       it->second + "'");
  }

  std::vector<double> get_real_list(const std::string& key,
                                    std::vector<double> fallback) const {
    const auto it = kv_.find(key);
    if (it == kv_.end()) return fallback;
    std::vector<double> out;
    std::stringstream ss(it->second);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
      tok = trim(tok);
      if (tok.empty()) continue;
      try {
        out.push_back(std::stod(tok));
      } catch (const std::exception&) {
        throw config_error("config key '" + key + "': not a number: '" + tok +
                           "'");
      }
    }
    if (out.empty())
      throw config_error("config key '" + key + "': empty list");
    return out;
  }

  std::vector<std::string> get_str_list(const std::string& key) const {
    std::vector<std::string> out;
    const auto it = kv_.find(key);
    if (it == kv_.end()) return out;
    std::stringstream ss(it->second);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
      tok = trim(tok);
      if (!tok.empty()) out.push_back(tok);
    }
    return out;
  }

  /// Sorted key=value lines for the replayable file header.
  std::vector<std::string> echo_lines() const {
    std::vector<std::string> out;
    out.reserve(kv_.size());
    for (const auto& [k, v] : kv_) out.push_back(k + "=" + v);
    return out;
  }

 private:
  static std::string trim(std::string s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
  }

  std::map<std::string, std::string> kv_;
};

namespace detail {

/// Materializes data.* keys. Synthetic sources generate `extra` additional
/// examples beyond data.n so stability runs can swap in a held-out one.
inline Dataset resolve_dataset(const KvMap& cfg, std::size_t extra) {
  const std::string source = cfg.get_str("data.source", std::string("synthetic"));
  Dataset ds;
  if (source == "synthetic") {
    SyntheticSpec spec;
    spec.family = synthetic_family_from_name(
        cfg.get_str("data.family", std::string("gaussian-features-linear-labels")));
    spec.dim = static_cast<std::size_t>(cfg.get_int("data.dim", 10));
    spec.n = static_cast<std::size_t>(cfg.get_int("data.n")) + extra;
    spec.seed = cfg.get_u64("data.seed", 1);
    spec.kappa = cfg.get_real("data.kappa", 1.0);
    spec.nu = cfg.get_real("data.nu", 2.5);
    spec.scale_decay = cfg.get_real("data.scale_decay", 0.0);
    spec.label_flip = cfg.get_real("data.label_flip", 0.0);
    ds = gen_synthetic(spec);
  } else if (source == "libsvm") {
    const std::string path = cfg.get_str("data.path");
    const bool real_labels = cfg.get_str("data.labels", std::string("classes")) == "real";
    ds = parse_libsvm_file(path, real_labels);
    if (cfg.has("data.n")) {
      const std::size_t want =
          static_cast<std::size_t>(cfg.get_int("data.n")) + extra;
      if (ds.n() < want)
        throw config_error("data.n: file holds " + std::to_string(ds.n()) +
                           " examples, need " + std::to_string(want) +
                           " (including held-out replacements)");
      ds.examples.resize(want);
    } else if (extra > 0 && ds.n() <= extra) {
      throw config_error("data.path: file too small to hold out " +
                         std::to_string(extra) + " replacement example(s)");
    }
  } else {
    throw config_error("data.source: unknown value '" + source + "'");
  }
  if (cfg.get_flag("data.normalize", false)) ds = normalize_rows(ds);
  return ds;
}

inline ProblemOpts resolve_radii(const KvMap& cfg) {
  ProblemOpts opts;
  opts.ball_w = cfg.get_real("problem.bw", 5.0);
  opts.ball_v = cfg.get_real("problem.bv", 5.0);
  if (!(opts.ball_w > 0.0)) throw config_error("problem.bw: must be > 0");
  if (!(opts.ball_v > 0.0)) throw config_error("problem.bv: must be > 0");
  return opts;
}

/// Problem constructor closure with all structural parameters pinned, so S
/// and S' runs share the identical objective family (including the AUC
/// positive-class probability).
inline ProblemFactory make_factory(const KvMap& cfg, const Dataset& train) {
  const ProblemKind kind = problem_kind_from_name(cfg.get_str("problem.kind"));
  const ProblemOpts opts = resolve_radii(cfg);
  switch (kind) {
    case ProblemKind::quadratic_scsc: {
      const double rho = cfg.get_real("problem.rho", 1.0);
      if (!(rho > 0.0)) throw config_error("problem.rho: must be > 0");
      if (train.feature_dim() < 3 || train.feature_dim() % 2 == 0)
        throw config_error(
            "problem.kind=quadratic-scsc: features must pack (z1, z2, z3)");
      const std::size_t dim = (train.feature_dim() - 1) / 2;
      return [rho, dim, opts](const Dataset& d) {
        return make_quadratic_scsc(rho, dim, d, opts);
      };
    }
    case ProblemKind::bilinear_cc:
      return [opts](const Dataset& d) { return make_bilinear_cc(d, opts); };
    case ProblemKind::auc_solam: {
      double p = cfg.get_real("problem.p", -1.0);
      if (p < 0.0) {
        p = train.positive_fraction();
        if (p <= 0.0 || p >= 1.0)
          throw config_error(
              "problem.p: training data is single-class; set problem.p");
      } else if (!(p > 0.0 && p < 1.0)) {
        throw config_error("problem.p: must be in (0,1)");
      }
      return [p, opts](const Dataset& d) {
        return make_auc_minimax(d, p, opts);
      };
    }
    case ProblemKind::robust_mean:
      return [opts](const Dataset& d) { return make_robust_mean(d, opts); };
  }
  throw config_error("problem.kind: unknown kind");
}

inline Schedule resolve_schedule(const KvMap& cfg, double eta_label) {
  const ScheduleKind kind = schedule_kind_from_name(
      cfg.get_str("schedule.kind", std::string("const-over-sqrtT")));
  switch (kind) {
    case ScheduleKind::constant:
      return Schedule::constant(eta_label > 0.0
                                    ? eta_label
                                    : cfg.get_real("schedule.eta"));
    case ScheduleKind::const_over_sqrt_T:
      return Schedule::const_over_sqrt_T(
          eta_label > 0.0 ? eta_label : cfg.get_real("schedule.eta"));
    case ScheduleKind::c_over_t:
      return Schedule::c_over_t(cfg.get_real("schedule.c"));
    case ScheduleKind::inv_rho_t:
      return Schedule::inv_rho_t(cfg.get_real("schedule.rho"));
    case ScheduleKind::inv_rho_t_shifted:
      return Schedule::inv_rho_t_shifted(cfg.get_real("schedule.rho"),
                                         cfg.get_real("schedule.t0", 0.0));
  }
  throw config_error("schedule.kind: unknown kind");
}

/// Optional nonzero starting point: init=ball draws a deterministic
/// direction from init.seed and scales it to init.scale x radius on each
/// side. Default is the standard all-zero start.
inline Point resolve_init_point(const KvMap& cfg, const MinimaxProblem& p) {
  const std::string mode = cfg.get_str("init", std::string("zeros"));
  if (mode == "zeros") return {};
  if (mode != "ball")
    throw config_error("init: unknown value '" + mode + "'");
  const double frac = cfg.get_real("init.scale", 0.5);
  if (!(frac >= 0.0 && frac <= 1.0))
    throw config_error("init.scale: must be in [0, 1]");
  RngStream rng(cfg.get_u64("init.seed", 2024));
  const auto draw = [&](std::size_t dim, double radius) {
    Vec x(dim);
    for (double& e : x) e = rng.next_gaussian();
    const double nx = norm2(x);
    if (nx > 0.0 && std::isfinite(radius)) scale(x, frac * radius / nx);
    return x;
  };
  Point init;
  init.w = draw(p.primal_dim, p.ball_w);
  init.v = draw(p.dual_dim, p.ball_v);
  return init;
}

inline long resolve_iters(const KvMap& cfg, std::size_t n) {
  if (cfg.has("T") && cfg.has("passes"))
    throw config_error("set either T or passes, not both");
  long iters = 0;
  if (cfg.has("passes"))
    iters = cfg.get_int("passes") * static_cast<long>(n);
  else
    iters = cfg.get_int("T");
  if (iters < 1) throw config_error("T: must be >= 1");
  return iters;
}

/// Fill a bound query with everything the problem and config know; explicit
/// bound.param.<key> entries win.
inline bounds::BoundQuery auto_bound_query(const std::string& name,
                                           const KvMap& cfg,
                                           const MinimaxProblem& p,
                                           long iters, double eta_eff) {
  bounds::BoundQuery q;
  q.name = name;
  q.params["n"] = static_cast<double>(p.n());
  q.params["T"] = static_cast<double>(iters);
  q.params["t"] = static_cast<double>(iters);
  if (eta_eff > 0.0) q.params["eta"] = eta_eff;
  if (std::isfinite(p.lipschitz_g)) q.params["G"] = p.lipschitz_g;
  if (p.has_smooth_l()) q.params["L"] = p.smooth_l;
  const double rho = p.sc_rho > 0.0 ? p.sc_rho : p.wc_rho;
  if (rho > 0.0) {
    q.params["rho"] = rho;
    q.params["beta1"] = rho;
    q.params["beta2"] = rho;
  }
  if (std::isfinite(p.ball_w)) q.params["bw"] = p.ball_w;
  if (std::isfinite(p.ball_v)) q.params["bv"] = p.ball_v;
  if (cfg.has("schedule.c")) q.params["c"] = cfg.get_real("schedule.c");
  if (cfg.has("schedule.t0")) q.params["t0"] = cfg.get_real("schedule.t0");
  for (const std::string& line : cfg.echo_lines()) {
    constexpr const char* prefix = "bound.param.";
    if (line.rfind(prefix, 0) == 0) {
      const std::size_t eq = line.find('=');
      const std::string key = line.substr(12, eq - 12);
      q.params[key] = cfg.get_real(line.substr(0, eq));
    }
  }
  return q;
}

inline double effective_constant_eta(const Schedule& s, long iters) {
  switch (s.kind) {
    case ScheduleKind::constant:
      return s.eta;
    case ScheduleKind::const_over_sqrt_T:
      return s.eta / std::sqrt(static_cast<double>(iters));
    default:
      return 0.0;  // not a constant schedule
  }
}

}  // namespace detail

/// run-stability: the paired neighboring-run protocol over an eta grid.
inline int cmd_run_stability(const KvMap& cfg, std::ostream& log) {
  const long extra = cfg.get_flag("stability.identical", false) ? 0 : 1;
  Dataset full = detail::resolve_dataset(cfg, static_cast<std::size_t>(extra));
  Dataset train = full;
  Example replacement;
  if (extra == 1) {
    train.examples.pop_back();
    replacement = full.examples.back();
  } else {
    replacement = full.examples.back();  // degenerate pair: S == S'
  }
  const std::size_t n = train.n();
  const std::size_t change_index = static_cast<std::size_t>(
      cfg.get_int("stability.change_index", static_cast<long>(n) - 1));
  if (change_index >= n)
    throw config_error("stability.change_index: out of range");
  const NeighborPair pair = make_neighbor(train, change_index, replacement);
  const ProblemFactory factory = detail::make_factory(cfg, train);

  StabilityConfig sc;
  sc.eta_grid = cfg.get_real_list("stability.eta_grid", {0.1, 0.3, 1.0, 3.0});
  sc.repeats = static_cast<int>(cfg.get_int("repeats", 25));
  sc.iters = detail::resolve_iters(cfg, n);
  sc.record_every = cfg.get_int("record_every", static_cast<long>(n));
  sc.seed = cfg.get_u64("seed", 1);
  sc.algo = algorithm_from_name(cfg.get_str("algo", std::string("sgda")));
  sc.init = detail::resolve_init_point(cfg, factory(train));
  sc.schedule_for = [&cfg](double eta) {
    return detail::resolve_schedule(cfg, eta);
  };
  // validate the schedule once up-front so errors name the key
  (void)detail::resolve_schedule(cfg, sc.eta_grid.front());

  std::vector<StabilityTrace> traces = stability_experiment(factory, pair, sc);
  std::sort(traces.begin(), traces.end(),
            [](const StabilityTrace& a, const StabilityTrace& b) {
              return a.eta_label < b.eta_label;
            });

  const std::string out_path = cfg.get_str("out");
  write_file(out_path, [&](std::ostream& out) {
    write_trace_csv(traces, out, cfg.echo_lines());
  });
  for (const StabilityTrace& tr : traces)
    log << "trace eta=" << format_short(tr.eta_label) << " repeats="
        << tr.repeats << " final_pass=" << format_short(tr.passes.back())
        << " final_mean_delta=" << format_short(tr.delta_mean.back()) << " -> "
        << out_path << "\n";
  return 0;
}

namespace detail {

/// Population reference resolved from pop.* keys; nullopt when the config
/// does not request one.
inline std::optional<PopulationModel> resolve_population(
    const KvMap& cfg, const MinimaxProblem& p) {
  const std::string mode = cfg.get_str("pop.source", std::string("none"));
  if (mode == "none") return std::nullopt;
  if (mode == "analytic") {
    if (p.kind == ProblemKind::quadratic_scsc) {
      // synthetic coefficient families are centered: all first moments zero
      return PopulationModel::quadratic_moments(0.0, zeros(p.primal_dim),
                                                zeros(p.primal_dim));
    }
    if (p.kind == ProblemKind::bilinear_cc) {
      std::vector<double> m(p.primal_dim * p.primal_dim, 0.0);
      for (std::size_t i = 0; i < p.primal_dim; ++i)
        m[i * p.primal_dim + i] = 1.0;  // E[z z^T] = I for standard normal z
      return PopulationModel::bilinear_moments(std::move(m));
    }
    throw config_error(
        "pop.source=analytic: only quadratic-scsc and bilinear-cc have known "
        "moments");
  }
  if (mode == "monte-carlo") {
    if (cfg.get_str("data.source", std::string("synthetic")) != "synthetic")
      throw config_error(
          "pop.source=monte-carlo: requires data.source=synthetic");
    SyntheticSpec spec;
    spec.family = synthetic_family_from_name(
        cfg.get_str("data.family", std::string("gaussian-features-linear-labels")));
    spec.dim = static_cast<std::size_t>(cfg.get_int("data.dim", 10));
    spec.n = static_cast<std::size_t>(cfg.get_int("pop.samples", 100000));
    spec.seed = cfg.get_u64("pop.seed", 99);
    spec.kappa = cfg.get_real("data.kappa", 1.0);
    spec.nu = cfg.get_real("data.nu", 2.5);
    Dataset test = gen_synthetic(spec);
    if (cfg.get_flag("data.normalize", false)) test = normalize_rows(test);
    return PopulationModel::from_test_set(std::move(test));
  }
  if (mode == "test-file") {
    const bool real_labels =
        cfg.get_str("data.labels", std::string("classes")) == "real";
    Dataset test = parse_libsvm_file(cfg.get_str("pop.path"), real_labels);
    if (cfg.get_flag("data.normalize", false)) test = normalize_rows(test);
    return PopulationModel::from_test_set(std::move(test));
  }
  throw config_error("pop.source: unknown value '" + mode + "'");
}

struct MetricAccumulator {
  std::map<std::string, std::vector<double>> samples;
  void add(const std::string& key, double v) { samples[key].push_back(v); }
  void emit(std::vector<MetricRow>& rows, const std::string& method) const {
    for (const auto& [key, vals] : samples) {
      double mean = 0.0;
      for (double v : vals) mean += v;
      mean /= static_cast<double>(vals.size());
      double var = 0.0;
      for (double v : vals) var += (v - mean) * (v - mean);
      const double se =
          vals.size() > 1
              ? std::sqrt(var / static_cast<double>(vals.size() - 1) /
                          static_cast<double>(vals.size()))
              : 0.0;
      rows.push_back({key, mean, se, method});
    }
  }
};

}  // namespace detail

/// run-risk: run the algorithm over `repeats` seeds and report the averaged
/// iterate's performance measures (mean and standard error over seeds).
inline int cmd_run_risk(const KvMap& cfg, std::ostream& log) {
  Dataset train = detail::resolve_dataset(cfg, 0);
  const ProblemFactory factory = detail::make_factory(cfg, train);
  const MinimaxProblem problem = factory(train);
  const long iters = detail::resolve_iters(cfg, train.n());
  const int repeats = static_cast<int>(cfg.get_int("repeats", 1));
  if (repeats < 1) throw config_error("repeats: must be >= 1");
  const std::uint64_t seed = cfg.get_u64("seed", 1);
  const bool use_final = cfg.get_str("risk.point", std::string("averaged")) ==
                         "final";

  RunConfig rc;
  rc.algo = algorithm_from_name(cfg.get_str("algo", std::string("sgda")));
  rc.sched = detail::resolve_schedule(cfg, 0.0);
  rc.iters = iters;
  rc.init = detail::resolve_init_point(cfg, problem);

  const auto pop = detail::resolve_population(cfg, problem);
  InnerSolverConfig inner;
  inner.tol = cfg.get_real("inner.tol", 1e-8);
  inner.max_iters = cfg.get_int("inner.max_iters", 100000);

  detail::MetricAccumulator acc;
  std::vector<int> reliable_flags(static_cast<std::size_t>(repeats), 1);
  for (int r = 0; r < repeats; ++r) {
    RunConfig mine = rc;
    mine.seed = derive_seed(seed, static_cast<std::uint64_t>(r));
    const Trajectory traj = run(problem, mine);
    const Point& pt = use_final ? traj.final_pt : traj.averaged;
    acc.add("f_emp", empirical_value(problem, pt));
    const GapResult gap = empirical_weak_pd_gap(problem, pt, inner);
    acc.add("weak_pd_emp", gap.value);
    if (!gap.reliable) reliable_flags[static_cast<std::size_t>(r)] = 0;
    if (pop) {
      const RiskReport rep = generalization_gap(problem, *pop, pt, inner);
      acc.add("f_pop", rep.f_pop);
      acc.add("gap_plain", rep.gap_plain);
      acc.add("weak_pd_pop", rep.weak_pd_pop);
      acc.add("weak_pd_gen", rep.weak_pd_gen);
      acc.add("strong_pd_emp", rep.strong_pd_emp);
      acc.add("primal_emp", rep.primal_emp);
      acc.add("primal_pop", rep.primal_pop);
      if (!rep.reliable) reliable_flags[static_cast<std::size_t>(r)] = 0;
    } else {
      acc.add("strong_pd_emp", strong_pd_empirical_risk(problem, pt, inner).value);
      acc.add("primal_emp", empirical_primal_risk(problem, pt.w, inner).value);
    }
  }

  std::vector<MetricRow> rows;
  const bool all_reliable =
      std::all_of(reliable_flags.begin(), reliable_flags.end(),
                  [](int f) { return f == 1; });
  const std::string method = pop ? (pop->mode == PopulationModel::Mode::analytic
                                        ? "analytic"
                                        : "monte-carlo")
                                 : "empirical";
  acc.emit(rows, all_reliable ? method : method + "-unreliable");

  // gradient-dominance check for the quadratic family
  const long pl_resamples = cfg.get_int("risk.pl_resamples", 0);
  if (pl_resamples > 0) {
    if (problem.kind != ProblemKind::quadratic_scsc)
      throw config_error(
          "risk.pl_resamples: only supported for problem.kind=quadratic-scsc");
    SyntheticSpec spec;
    spec.family = SyntheticFamily::quadratic_saddle_coeffs;
    spec.dim = problem.primal_dim;
    spec.n = train.n();
    spec.kappa = cfg.get_real("data.kappa", 1.0);
    const auto pop_quad = PopulationModel::quadratic_moments(
        0.0, zeros(problem.primal_dim), zeros(problem.primal_dim));
    const double rho = problem.quad_rho;
    const ProblemOpts opts{problem.ball_w, problem.ball_v};
    const std::size_t dim = problem.primal_dim;
    const PlGapResult pl = verify_pl_gap(
        [&](std::uint64_t s) {
          SyntheticSpec draw = spec;
          draw.seed = s;
          return make_quadratic_scsc(rho, dim, gen_synthetic(draw), opts);
        },
        pop_quad, static_cast<int>(pl_resamples), cfg.get_u64("seed", 1));
    rows.push_back({"pl_lhs", pl.lhs, pl.lhs_stderr, "monte-carlo"});
    rows.push_back({"pl_rhs", pl.rhs, 0.0, "formula"});
    rows.push_back({"pl_distance_term", pl.distance_term, 0.0, "monte-carlo"});
  }

  // requested closed-form bounds, evaluated at this run's parameters
  for (const std::string& name : cfg.get_str_list("bounds")) {
    const double eta_eff = detail::effective_constant_eta(rc.sched, iters);
    const double v =
        bounds::eval(detail::auto_bound_query(name, cfg, problem, iters, eta_eff));
    rows.push_back({"bound:" + name, v, 0.0, "formula"});
  }

  const std::string out_path = cfg.get_str("out");
  write_file(out_path, [&](std::ostream& out) {
    write_metrics_csv(rows, out, cfg.echo_lines());
  });
  log << "risk repeats=" << repeats << " T=" << iters << " metrics="
      << rows.size() << " -> " << out_path << "\n";
  return 0;
}

/// run-convergence: weak PD empirical gap of the averaged iterate across a
/// grid of iteration budgets, with optional bound rows per T.
inline int cmd_run_convergence(const KvMap& cfg, std::ostream& log) {
  Dataset train = detail::resolve_dataset(cfg, 0);
  const ProblemFactory factory = detail::make_factory(cfg, train);
  const MinimaxProblem problem = factory(train);
  const int repeats = static_cast<int>(cfg.get_int("repeats", 25));
  if (repeats < 1) throw config_error("repeats: must be >= 1");
  const std::uint64_t seed = cfg.get_u64("seed", 1);
  std::vector<double> t_grid = cfg.get_real_list("convergence.t_grid", {});
  if (t_grid.empty()) throw config_error("missing required config key 'convergence.t_grid'");

  InnerSolverConfig inner;
  std::vector<MetricRow> rows;
  for (double t_real : t_grid) {
    const long iters = static_cast<long>(t_real);
    if (iters < 1) throw config_error("convergence.t_grid: entries must be >= 1");
    RunConfig rc;
    rc.algo = algorithm_from_name(cfg.get_str("algo", std::string("sgda")));
    rc.sched = detail::resolve_schedule(cfg, 0.0);
    rc.iters = iters;
    rc.init = detail::resolve_init_point(cfg, problem);
    std::vector<double> gaps(static_cast<std::size_t>(repeats), 0.0);
    parallel_repeats(repeats, [&](int r) {
      RunConfig mine = rc;
      mine.seed = derive_seed(seed, static_cast<std::uint64_t>(r));
      const Trajectory traj = run(problem, mine);
      gaps[static_cast<std::size_t>(r)] =
          empirical_weak_pd_gap(problem, traj.averaged, inner).value;
    });
    double mean = 0.0;
    for (double g : gaps) mean += g;
    mean /= static_cast<double>(repeats);
    double var = 0.0;
    for (double g : gaps) var += (g - mean) * (g - mean);
    const double se = repeats > 1
                          ? std::sqrt(var / static_cast<double>(repeats - 1) /
                                      static_cast<double>(repeats))
                          : 0.0;
    const std::string suffix = "@T=" + std::to_string(iters);
    rows.push_back({"weak_pd_gap" + suffix, mean, se, "empirical"});
    for (const std::string& name : cfg.get_str_list("bounds")) {
      const double eta_eff = detail::effective_constant_eta(rc.sched, iters);
      const double v = bounds::eval(
          detail::auto_bound_query(name, cfg, problem, iters, eta_eff));
      rows.push_back({"bound:" + name + suffix, v, 0.0, "formula"});
    }
    log << "convergence T=" << iters << " mean_gap=" << format_short(mean)
        << " stderr=" << format_short(se) << "\n";
  }

  const std::string out_path = cfg.get_str("out");
  write_file(out_path, [&](std::ostream& out) {
    write_metrics_csv(rows, out, cfg.echo_lines());
  });
  log << "convergence grid=" << t_grid.size() << " -> " << out_path << "\n";
  return 0;
}

/// compute-bound <name> k=v...: one CSV row "name,params,value".
inline int cmd_compute_bound(const std::vector<std::string>& args,
                             std::ostream& log) {
  if (args.empty()) throw config_error("compute-bound: missing bound name");
  bounds::BoundQuery q;
  q.name = args.front();
  for (std::size_t i = 1; i < args.size(); ++i) {
    const std::string& pair = args[i];
    const std::size_t eq = pair.find('=');
    if (eq == std::string::npos)
      throw config_error("compute-bound: expected key=value, got '" + pair +
                         "'");
    const std::string key = pair.substr(0, eq);
    const std::string val = pair.substr(eq + 1);
    try {
      q.params[key] = std::stod(val);
    } catch (const std::exception&) {
      throw config_error("compute-bound: parameter '" + key +
                         "': not a number: '" + val + "'");
    }
  }
  const double v = bounds::eval(q);
  std::string params;
  for (const auto& [k, val] : q.params) {
    if (!params.empty()) params += ';';
    params += k + "=" + format_real(val);
  }
  log << q.name << ',' << params << ',' << format_real(v) << "\n";
  return 0;
}

/// gen-data: synthesize a dataset and serialize it (sparse text format).
inline int cmd_gen_data(const KvMap& cfg, std::ostream& log) {
  Dataset ds = detail::resolve_dataset(cfg, 0);
  const std::string out_path = cfg.get_str("out");
  write_file(out_path, [&](std::ostream& out) {
    for (const std::string& line : cfg.echo_lines()) out << "# " << line << '\n';
    serialize_libsvm(ds, out);
  });
  log << "gen-data n=" << ds.n() << " dim=" << ds.feature_dim() << " -> "
      << out_path << "\n";
  return 0;
}

/// parse-data: read a file, print a summary, optionally re-serialize.
inline int cmd_parse_data(const KvMap& cfg, std::ostream& log) {
  const bool real_labels =
      cfg.get_str("data.labels", std::string("classes")) == "real";
  Dataset ds = parse_libsvm_file(cfg.get_str("in"), real_labels);
  if (cfg.get_flag("data.normalize", false)) ds = normalize_rows(ds);
  log << "parse-data n=" << ds.n() << " dim=" << ds.feature_dim()
      << " positive_fraction=" << format_short(ds.positive_fraction()) << "\n";
  if (cfg.has("out")) {
    write_file(cfg.get_str("out"),
               [&](std::ostream& out) { serialize_libsvm(ds, out); });
    log << "parse-data -> " << cfg.get_str("out") << "\n";
  }
  return 0;
}

inline const char* usage() {
  return
      "usage: minimax_stab <subcommand> [--config FILE] [key=value ...]\n"
      "subcommands:\n"
      "  run-stability    paired neighboring-dataset distance traces\n"
      "  run-risk         performance measures of a trained iterate\n"
      "  run-convergence  weak PD gap across an iteration-budget grid\n"
      "  compute-bound    evaluate a closed-form bound: <name> key=value...\n"
      "  gen-data         synthesize a dataset file\n"
      "  parse-data       parse and summarize a dataset file\n";
}

/// Shared entry point for the binary and the tests. Returns the process
/// exit code: 0 success, 1 runtime failure, 2 configuration error.
inline int dispatch(const std::vector<std::string>& argv, std::ostream& out,
                    std::ostream& err) {
  try {
    if (argv.empty()) {
      err << usage();
      return 2;
    }
    const std::string& cmd = argv.front();
    if (cmd == "help" || cmd == "--help" || cmd == "-h") {
      out << usage();
      return 0;
    }
    if (cmd == "compute-bound") {
      return cmd_compute_bound(
          std::vector<std::string>(argv.begin() + 1, argv.end()), out);
    }
    KvMap cfg;
    for (std::size_t i = 1; i < argv.size(); ++i) {
      if (argv[i] == "--config") {
        if (i + 1 >= argv.size())
          throw config_error("--config: missing file path");
        cfg.load_file(argv[++i]);
      } else {
        cfg.apply_override(argv[i]);
      }
    }
    if (cmd == "run-stability") return cmd_run_stability(cfg, out);
    if (cmd == "run-risk") return cmd_run_risk(cfg, out);
    if (cmd == "run-convergence") return cmd_run_convergence(cfg, out);
    if (cmd == "gen-data") return cmd_gen_data(cfg, out);
    if (cmd == "parse-data") return cmd_parse_data(cfg, out);
    err << "unknown subcommand '" << cmd << "'\n" << usage();
    return 2;
  } catch (const config_error& e) {
    err << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace cli
}  // namespace minimax
