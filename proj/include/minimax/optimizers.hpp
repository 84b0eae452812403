#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "minimax/problems.hpp"
#include "minimax/rng.hpp"
#include "minimax/schedule.hpp"
#include "minimax/vec.hpp"

namespace minimax {

enum class Algorithm { sgda, agda };

inline std::string algorithm_name(Algorithm a) {
  return a == Algorithm::sgda ? "sgda" : "agda";
}

inline Algorithm algorithm_from_name(const std::string& name) {
  if (name == "sgda") return Algorithm::sgda;
  if (name == "agda") return Algorithm::agda;
  throw config_error("algo: unknown value '" + name + "'");
}

/// Simultaneous projected stochastic step: both gradients are evaluated at
/// the incoming point, then w descends and v ascends.
inline Point sgda_step(const MinimaxProblem& p, const Point& pt,
                       const Example& z, double eta) {
  const GradPair g = grad(p, pt, z);
  Point next;
  next.w = pt.w;
  axpy(-eta, g.gw, next.w);
  next.w = project_ball(std::move(next.w), p.ball_w);
  next.v = pt.v;
  axpy(eta, g.gv, next.v);
  next.v = project_ball(std::move(next.v), p.ball_v);
  return next;
}

/// Alternating step: w moves first on z_i, then v ascends at the already
/// updated w on an independently drawn z_j.
inline Point agda_step(const MinimaxProblem& p, const Point& pt,
                       const Example& z_i, const Example& z_j, double eta_w,
                       double eta_v) {
  Point next;
  const GradPair gi = grad(p, pt, z_i);
  next.w = pt.w;
  axpy(-eta_w, gi.gw, next.w);
  next.w = project_ball(std::move(next.w), p.ball_w);
  const Point mid{next.w, pt.v};
  const GradPair gj = grad(p, mid, z_j);
  next.v = pt.v;
  axpy(eta_v, gj.gv, next.v);
  next.v = project_ball(std::move(next.v), p.ball_v);
  return next;
}

struct RunConfig {
  Algorithm algo = Algorithm::sgda;
  Schedule sched;            // eta_t (eta_{w,t} for agda)
  Schedule sched_v;          // agda dual steps; ignored for sgda
  bool separate_dual = false;  // agda: use sched_v instead of sched for v
  long iters = 0;            // T
  std::uint64_t seed = 0;
  bool store_history = false;
  /// Starting point; empty vectors mean the standard (0, 0). Some objectives
  /// (pure bilinear coupling, the symmetric robust objective) make (0, 0) a
  /// stationary or invariant configuration, so experiments that need moving
  /// iterates override this.
  Point init;
};

/// Iterate history plus the exact randomness that produced it. `averaged`
/// is the step-size weighted average of the pre-update iterates
/// (w_1..w_T, v_1..v_T); `indices` holds i_t (interleaved with j_t for
/// agda) so a run can be replayed bit-exactly.
struct Trajectory {
  Point final_pt;
  Point averaged;
  std::vector<Point> history;  // w_1..w_{T+1} when requested
  std::vector<std::uint32_t> indices;
  std::vector<double> eta_log;    // per-step eta (primal side for agda)
  std::vector<double> eta_v_log;  // agda only
  std::uint64_t seed = 0;
  long iters = 0;
};

inline std::size_t indices_per_iter(Algorithm a) {
  return a == Algorithm::agda ? 2 : 1;
}

inline Point resolve_init(const MinimaxProblem& p, const Point& init) {
  if (init.w.empty() && init.v.empty())
    return Point{zeros(p.primal_dim), zeros(p.dual_dim)};
  if (init.w.size() != p.primal_dim || init.v.size() != p.dual_dim)
    throw config_error("run: init dimension mismatch");
  return Point{project_ball(init.w, p.ball_w), project_ball(init.v, p.ball_v)};
}

inline std::vector<std::uint32_t> draw_index_stream(std::uint64_t seed,
                                                    Algorithm algo, long iters,
                                                    std::size_t n) {
  RngStream rng(seed);
  std::vector<std::uint32_t> out;
  out.reserve(static_cast<std::size_t>(iters) * indices_per_iter(algo));
  for (long t = 0; t < iters * static_cast<long>(indices_per_iter(algo)); ++t)
    out.push_back(static_cast<std::uint32_t>(rng.next_index(n)));
  return out;
}

/// Run the configured algorithm consuming a pre-drawn index stream.
/// Starting point is (0, 0).
inline Trajectory run_with_indices(const MinimaxProblem& p,
                                   const RunConfig& cfg,
                                   std::span<const std::uint32_t> indices) {
  if (cfg.iters < 1) throw config_error("run: T must be >= 1");
  if (p.n() == 0) throw config_error("run: empty dataset");
  const std::size_t per = indices_per_iter(cfg.algo);
  if (indices.size() != static_cast<std::size_t>(cfg.iters) * per)
    throw std::invalid_argument("run_with_indices: stream length mismatch");
  if ((cfg.sched.kind == ScheduleKind::inv_rho_t ||
       cfg.sched.kind == ScheduleKind::inv_rho_t_shifted) &&
      !(cfg.sched.rho > 0.0))
    throw config_error("run: schedule requires rho > 0");

  Trajectory traj;
  traj.seed = cfg.seed;
  traj.iters = cfg.iters;
  traj.indices.assign(indices.begin(), indices.end());
  traj.eta_log.reserve(static_cast<std::size_t>(cfg.iters));

  Point pt = resolve_init(p, cfg.init);
  Vec sum_w = zeros(p.primal_dim);
  Vec sum_v = zeros(p.dual_dim);
  double sum_eta = 0.0;
  if (cfg.store_history) traj.history.push_back(pt);

  for (long t = 1; t <= cfg.iters; ++t) {
    const double eta = schedule_eval(cfg.sched, t, cfg.iters);
    traj.eta_log.push_back(eta);
    // pre-update iterate enters the average
    axpy(eta, pt.w, sum_w);
    axpy(eta, pt.v, sum_v);
    sum_eta += eta;
    if (cfg.algo == Algorithm::sgda) {
      const Example& z = p.data.examples[indices[static_cast<std::size_t>(t - 1)]];
      pt = sgda_step(p, pt, z, eta);
    } else {
      const double eta_v =
          cfg.separate_dual ? schedule_eval(cfg.sched_v, t, cfg.iters) : eta;
      traj.eta_v_log.push_back(eta_v);
      const Example& zi =
          p.data.examples[indices[static_cast<std::size_t>(2 * (t - 1))]];
      const Example& zj =
          p.data.examples[indices[static_cast<std::size_t>(2 * (t - 1) + 1)]];
      pt = agda_step(p, pt, zi, zj, eta, eta_v);
    }
    if (cfg.store_history) traj.history.push_back(pt);
  }

  traj.final_pt = pt;
  scale(sum_w, 1.0 / sum_eta);
  scale(sum_v, 1.0 / sum_eta);
  traj.averaged = Point{std::move(sum_w), std::move(sum_v)};
  return traj;
}

/// Draw the index stream from cfg.seed, then run. Deterministic given
/// (seed, config); identical seeds give bitwise-identical trajectories.
inline Trajectory run(const MinimaxProblem& p, const RunConfig& cfg) {
  const auto stream = draw_index_stream(cfg.seed, cfg.algo, cfg.iters, p.n());
  return run_with_indices(p, cfg, stream);
}

}  // namespace minimax
