#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <thread>
#include <vector>

#include "minimax/optimizers.hpp"
#include "minimax/problems.hpp"
#include "minimax/rng.hpp"

namespace minimax {

/// Two datasets of equal size differing in exactly one position.
struct NeighborPair {
  Dataset s;
  Dataset s_prime;
  std::size_t changed_index = 0;
};

inline NeighborPair make_neighbor(const Dataset& dataset, std::size_t index,
                                  Example replacement) {
  if (index >= dataset.n())
    throw std::invalid_argument("make_neighbor: index out of range");
  if (replacement.features.size() != dataset.feature_dim())
    throw std::invalid_argument("make_neighbor: replacement dimension mismatch");
  NeighborPair pair;
  pair.s = dataset;
  pair.s_prime = dataset;
  pair.s_prime.examples[index] = std::move(replacement);
  pair.changed_index = index;
  return pair;
}

/// Builds the problem for a given dataset. Both datasets of a pair must map
/// to structurally identical problems (dims, radii, fixed parameters).
using ProblemFactory = std::function<MinimaxProblem(const Dataset&)>;

/// One repeat of the coupled experiment: iteration counts, passes (t/n) and
/// the joint distance at each recorded t.
struct DeltaTrace {
  std::vector<long> iters;
  std::vector<double> passes;
  std::vector<double> delta;
};

/// Run the same algorithm on S and S' with one shared index stream and
/// record the joint iterate distance every `record_every` steps.
inline DeltaTrace paired_run(const ProblemFactory& factory,
                             const NeighborPair& pair, const RunConfig& cfg,
                             long record_every) {
  if (record_every < 1)
    throw std::invalid_argument("paired_run: record_every must be >= 1");
  const MinimaxProblem prob_s = factory(pair.s);
  const MinimaxProblem prob_sp = factory(pair.s_prime);
  if (prob_s.kind != prob_sp.kind || prob_s.primal_dim != prob_sp.primal_dim ||
      prob_s.dual_dim != prob_sp.dual_dim || prob_s.ball_w != prob_sp.ball_w ||
      prob_s.ball_v != prob_sp.ball_v)
    throw std::logic_error("paired_run: factory produced mismatched problems");

  const auto stream =
      draw_index_stream(cfg.seed, cfg.algo, cfg.iters, pair.s.n());
  const double n = static_cast<double>(pair.s.n());

  // both runs share one starting point and one index stream
  Point a = resolve_init(prob_s, cfg.init);
  Point b = a;
  DeltaTrace trace;
  for (long t = 1; t <= cfg.iters; ++t) {
    const double eta = schedule_eval(cfg.sched, t, cfg.iters);
    if (cfg.algo == Algorithm::sgda) {
      const std::size_t i = stream[static_cast<std::size_t>(t - 1)];
      a = sgda_step(prob_s, a, prob_s.data.examples[i], eta);
      b = sgda_step(prob_sp, b, prob_sp.data.examples[i], eta);
    } else {
      const double eta_v =
          cfg.separate_dual ? schedule_eval(cfg.sched_v, t, cfg.iters) : eta;
      const std::size_t i = stream[static_cast<std::size_t>(2 * (t - 1))];
      const std::size_t j = stream[static_cast<std::size_t>(2 * (t - 1) + 1)];
      a = agda_step(prob_s, a, prob_s.data.examples[i],
                    prob_s.data.examples[j], eta, eta_v);
      b = agda_step(prob_sp, b, prob_sp.data.examples[i],
                    prob_sp.data.examples[j], eta, eta_v);
    }
    if (t % record_every == 0 || t == cfg.iters) {
      trace.iters.push_back(t);
      trace.passes.push_back(static_cast<double>(t) / n);
      trace.delta.push_back(joint_norm(a, b));
    }
  }
  return trace;
}

/// Aggregated distance trace for one step-size label.
struct StabilityTrace {
  std::vector<double> passes;
  std::vector<long> iters;
  std::vector<double> delta_mean;
  std::vector<double> delta_std;   // sample std over repeats (0 if repeats=1)
  std::vector<std::vector<double>> per_repeat;  // kept when requested
  double eta_label = 0.0;
  int repeats = 0;

  std::vector<double> stderr_() const {
    std::vector<double> se(delta_std.size());
    for (std::size_t i = 0; i < se.size(); ++i)
      se[i] = delta_std[i] / std::sqrt(static_cast<double>(repeats));
    return se;
  }
};

struct StabilityConfig {
  std::vector<double> eta_grid;  // labels; interpreted via schedule_for
  int repeats = 25;
  long iters = 0;
  long record_every = 0;  // 0 = one record per pass (n)
  std::uint64_t seed = 1;
  Algorithm algo = Algorithm::sgda;
  bool keep_per_repeat = false;
  Point init;  // shared starting point of every paired run; empty = (0, 0)
  /// Maps an eta label to the schedule used for that trace. Defaults to
  /// eta/sqrt(T).
  std::function<Schedule(double)> schedule_for =
      [](double eta) { return Schedule::const_over_sqrt_T(eta); };
};

/// Deterministic fan-out over repeats: each repeat owns its seed-derived
/// stream, results land in preallocated slots, reduction order is fixed.
/// MINIMAX_STAB_THREADS caps the worker count (0 = hardware).
inline void parallel_repeats(int repeats,
                             const std::function<void(int)>& body) {
  unsigned workers = thread_cap();
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = std::min<unsigned>(workers, static_cast<unsigned>(repeats));
  if (workers <= 1) {
    for (int r = 0; r < repeats; ++r) body(r);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w]() {
      for (int r = static_cast<int>(w); r < repeats;
           r += static_cast<int>(workers))
        body(r);
    });
  }
  for (std::thread& th : pool) th.join();
}

/// The paired-run protocol over an eta grid: one aggregated trace per eta,
/// means and standard deviations taken over `repeats` independent seeds.
inline std::vector<StabilityTrace> stability_experiment(
    const ProblemFactory& factory, const NeighborPair& pair,
    const StabilityConfig& cfg) {
  if (cfg.eta_grid.empty())
    throw config_error("stability: eta grid must be nonempty");
  if (cfg.repeats < 1) throw config_error("stability: repeats must be >= 1");
  if (cfg.iters < 1) throw config_error("stability: T must be >= 1");
  const long record_every =
      cfg.record_every > 0 ? cfg.record_every : static_cast<long>(pair.s.n());

  std::vector<StabilityTrace> traces;
  for (double eta : cfg.eta_grid) {
    RunConfig rc;
    rc.algo = cfg.algo;
    rc.sched = cfg.schedule_for(eta);
    rc.iters = cfg.iters;
    rc.init = cfg.init;

    std::vector<DeltaTrace> runs(static_cast<std::size_t>(cfg.repeats));
    parallel_repeats(cfg.repeats, [&](int r) {
      RunConfig mine = rc;
      mine.seed = derive_seed(cfg.seed, static_cast<std::uint64_t>(r));
      runs[static_cast<std::size_t>(r)] =
          paired_run(factory, pair, mine, record_every);
    });

    StabilityTrace tr;
    tr.eta_label = eta;
    tr.repeats = cfg.repeats;
    tr.passes = runs.front().passes;
    tr.iters = runs.front().iters;
    const std::size_t k = tr.passes.size();
    tr.delta_mean.assign(k, 0.0);
    tr.delta_std.assign(k, 0.0);
    for (const DeltaTrace& run : runs)
      for (std::size_t i = 0; i < k; ++i) tr.delta_mean[i] += run.delta[i];
    for (double& m : tr.delta_mean) m /= static_cast<double>(cfg.repeats);
    if (cfg.repeats > 1) {
      for (const DeltaTrace& run : runs)
        for (std::size_t i = 0; i < k; ++i) {
          const double d = run.delta[i] - tr.delta_mean[i];
          tr.delta_std[i] += d * d;
        }
      for (double& s : tr.delta_std)
        s = std::sqrt(s / static_cast<double>(cfg.repeats - 1));
    }
    if (cfg.keep_per_repeat) {
      tr.per_repeat.reserve(runs.size());
      for (DeltaTrace& run : runs) tr.per_repeat.push_back(std::move(run.delta));
    }
    traces.push_back(std::move(tr));
  }
  return traces;
}

}  // namespace minimax
