#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "minimax/problems.hpp"
#include "minimax/rng.hpp"
#include "minimax/vec.hpp"

namespace minimax {

/// Deterministic projected-gradient settings for evaluating sup/inf over
/// one block of F_S.
struct InnerSolverConfig {
  long max_iters = 100000;
  double tol = 1e-8;
  double step0 = 0.0;  // 0: 1/L when the problem knows L, else Armijo from 1
};

struct InnerResult {
  Vec x;
  double value = 0.0;     // F_S at the extremizer
  double residual = 0.0;  // projected-gradient residual at exit
  bool converged = false;
  long iters = 0;
};

namespace detail {

/// Projected gradient descent with Armijo-style backtracking on
/// phi(x) = sign * F_S(block...). Minimizes phi; callers flip the sign to
/// maximize.
template <typename Value, typename Gradient>
InnerResult proj_grad_minimize(const Value& phi, const Gradient& grad_phi,
                               Vec x0, double radius,
                               const InnerSolverConfig& cfg, double l_hint) {
  InnerResult res;
  res.x = project_ball(std::move(x0), radius);
  double step = cfg.step0 > 0.0
                    ? cfg.step0
                    : (std::isfinite(l_hint) && l_hint > 0.0 ? 1.0 / l_hint
                                                             : 1.0);
  double fx = phi(res.x);
  for (long k = 0; k < cfg.max_iters; ++k) {
    const Vec g = grad_phi(res.x);
    Vec trial;
    double f_trial = 0.0;
    for (;;) {
      trial = res.x;
      axpy(-step, g, trial);
      trial = project_ball(std::move(trial), radius);
      f_trial = phi(trial);
      const double quad =
          fx + dot(g, sub(trial, res.x)) + dist2_sq(trial, res.x) / (2.0 * step);
      if (f_trial <= quad + 1e-15 * std::fabs(fx) || step < 1e-16) break;
      step *= 0.5;
    }
    res.residual = std::sqrt(dist2_sq(trial, res.x)) / step;
    res.x = std::move(trial);
    fx = f_trial;
    res.iters = k + 1;
    if (res.residual <= cfg.tol) {
      res.converged = true;
      break;
    }
    step *= 1.3;  // recover from over-conservative backtracking
  }
  res.value = fx;
  return res;
}

}  // namespace detail

/// sup_v F_S(w_fixed, v) over the dual ball, iterative route.
inline InnerResult maximize_over_dual(const MinimaxProblem& p,
                                      const Vec& w_fixed,
                                      const InnerSolverConfig& cfg) {
  auto phi = [&](const Vec& v) {
    return -empirical_value(p, Point{w_fixed, v});
  };
  auto grad_phi = [&](const Vec& v) {
    Vec g = empirical_grad(p, Point{w_fixed, v}).gv;
    scale(g, -1.0);
    return g;
  };
  InnerResult r = detail::proj_grad_minimize(
      phi, grad_phi, zeros(p.dual_dim), p.ball_v, cfg,
      p.has_smooth_l() ? p.smooth_l : std::numeric_limits<double>::quiet_NaN());
  r.value = -r.value;
  return r;
}

/// inf_w F_S(w, v_fixed) over the primal ball, iterative route.
inline InnerResult minimize_over_primal(const MinimaxProblem& p,
                                        const Vec& v_fixed,
                                        const InnerSolverConfig& cfg) {
  auto phi = [&](const Vec& w) { return empirical_value(p, Point{w, v_fixed}); };
  auto grad_phi = [&](const Vec& w) {
    return empirical_grad(p, Point{w, v_fixed}).gw;
  };
  return detail::proj_grad_minimize(
      phi, grad_phi, zeros(p.primal_dim), p.ball_w, cfg,
      p.has_smooth_l() ? p.smooth_l : std::numeric_limits<double>::quiet_NaN());
}

namespace detail {

/// argmax over a ball of <c, x> - (rho/2)||x||^2 (rho > 0): the radial clip
/// of c / rho.
inline Vec ball_quadratic_argmax(const Vec& c, double rho, double radius) {
  const double nc = norm2(c);
  Vec x = c;
  if (nc == 0.0) {
    scale(x, 0.0);
    return x;
  }
  const double r = std::min(nc / rho, radius);
  scale(x, r / nc);
  return x;
}

struct SideResult {
  double value = 0.0;
  double residual = 0.0;
  bool reliable = true;
};

inline SideResult sup_dual_side(const MinimaxProblem& p, const Vec& w,
                                const InnerSolverConfig& cfg,
                                bool force_iterative) {
  if (!force_iterative) {
    switch (p.kind) {
      case ProblemKind::quadratic_scsc: {
        Vec c(p.dual_dim);
        for (std::size_t i = 0; i < p.dual_dim; ++i)
          c[i] = p.quad_mean_z1 * w[i] - p.quad_mean_z3[i];
        const Vec v = ball_quadratic_argmax(c, p.quad_rho, p.ball_v);
        return {empirical_value(p, Point{w, v}), 0.0, true};
      }
      case ProblemKind::bilinear_cc: {
        const Vec mw = detail::matvec(p.bilinear_m, w);
        return {p.ball_v * norm2(mw), 0.0, true};
      }
      case ProblemKind::auc_solam: {
        // F_S is alpha-quadratic: const + 2 m alpha - alpha^2, m data-driven.
        double m = 0.0;
        const std::size_t d = p.primal_dim - 2;
        for (const Example& z : p.data.examples) {
          double h = 0.0;
          for (std::size_t i = 0; i < d; ++i) h += w[i] * z.features[i];
          m += z.label > 0.0 ? -h / p.solam_p : h / (1.0 - p.solam_p);
        }
        m /= static_cast<double>(p.n());
        const double alpha = std::clamp(m, -p.ball_v, p.ball_v);
        return {empirical_value(p, Point{w, Vec{alpha}}), 0.0, true};
      }
      default:
        break;
    }
  }
  const InnerResult r = maximize_over_dual(p, w, cfg);
  return {r.value, r.residual, r.converged};
}

inline SideResult inf_primal_side(const MinimaxProblem& p, const Vec& v,
                                  const InnerSolverConfig& cfg,
                                  bool force_iterative) {
  if (!force_iterative) {
    switch (p.kind) {
      case ProblemKind::quadratic_scsc: {
        Vec c(p.primal_dim);
        for (std::size_t i = 0; i < p.primal_dim; ++i)
          c[i] = -(p.quad_mean_z1 * v[i] + p.quad_mean_z2[i]);
        const Vec w = ball_quadratic_argmax(c, p.quad_rho, p.ball_w);
        return {empirical_value(p, Point{w, v}), 0.0, true};
      }
      case ProblemKind::bilinear_cc: {
        const Vec mv = detail::matvec(p.bilinear_m, v);
        return {-p.ball_w * norm2(mv), 0.0, true};
      }
      default:
        break;
    }
  }
  const InnerResult r = minimize_over_primal(p, v, cfg);
  return {r.value, r.residual, r.converged};
}

}  // namespace detail

struct GapResult {
  double value = 0.0;
  double inner_residual = 0.0;
  bool reliable = true;
};

/// sup_v F_S(pt.w, v) - inf_w F_S(w, pt.v): the primal-dual suboptimality of
/// a realized point under the empirical objective. Closed forms are used for
/// the quadratic families (and the scalar dual of AUC); otherwise the inner
/// solver runs and nonconvergence flags the result instead of throwing.
inline GapResult empirical_weak_pd_gap(const MinimaxProblem& p,
                                       const Point& pt,
                                       const InnerSolverConfig& cfg = {},
                                       bool force_iterative = false) {
  detail::check_point(p, pt);
  const auto sup = detail::sup_dual_side(p, pt.w, cfg, force_iterative);
  const auto inf = detail::inf_primal_side(p, pt.v, cfg, force_iterative);
  GapResult g;
  g.value = sup.value - inf.value;
  g.inner_residual = std::max(sup.residual, inf.residual);
  g.reliable = sup.reliable && inf.reliable;
  return g;
}

/// R_S(w) = sup_v F_S(w, v).
inline GapResult empirical_primal_risk(const MinimaxProblem& p, const Vec& w,
                                       const InnerSolverConfig& cfg = {},
                                       bool force_iterative = false) {
  const auto sup = detail::sup_dual_side(p, w, cfg, force_iterative);
  return {sup.value, sup.residual, sup.reliable};
}

/// Strong PD empirical risk at a realized point, kept as an independent
/// code path from empirical_weak_pd_gap (the two must agree).
inline GapResult strong_pd_empirical_risk(const MinimaxProblem& p,
                                          const Point& pt,
                                          const InnerSolverConfig& cfg = {}) {
  const InnerResult sup = maximize_over_dual(p, pt.w, cfg);
  const InnerResult inf = minimize_over_primal(p, pt.v, cfg);
  GapResult g;
  g.value = sup.value - inf.value;
  g.inner_residual = std::max(sup.residual, inf.residual);
  g.reliable = sup.converged && inf.converged;
  return g;
}

/// Reference objective standing in for the population risk: exact first or
/// second moments for the synthetic families, or a held-out test set.
struct PopulationModel {
  enum class Mode { analytic, test_set } mode = Mode::analytic;
  double mu_z1 = 0.0;                 // quadratic first moments
  Vec mu_z2, mu_z3;
  std::vector<double> second_moment;  // bilinear population E[z z^T]
  Dataset test;

  static PopulationModel quadratic_moments(double mu1, Vec mu2, Vec mu3) {
    PopulationModel m;
    m.mode = Mode::analytic;
    m.mu_z1 = mu1;
    m.mu_z2 = std::move(mu2);
    m.mu_z3 = std::move(mu3);
    return m;
  }
  static PopulationModel bilinear_moments(std::vector<double> second) {
    PopulationModel m;
    m.mode = Mode::analytic;
    m.second_moment = std::move(second);
    return m;
  }
  static PopulationModel from_test_set(Dataset test) {
    PopulationModel m;
    m.mode = Mode::test_set;
    m.test = std::move(test);
    return m;
  }
};

/// Same objective family rebound to another dataset; fixed structural
/// parameters (radii, p, rho) are kept so f itself is unchanged.
inline MinimaxProblem rebind_dataset(const MinimaxProblem& p, Dataset data) {
  data.validate();
  switch (p.kind) {
    case ProblemKind::quadratic_scsc: {
      MinimaxProblem q = make_quadratic_scsc(
          p.quad_rho, p.primal_dim, std::move(data), {p.ball_w, p.ball_v});
      return q;
    }
    case ProblemKind::bilinear_cc:
      return make_bilinear_cc(std::move(data), {p.ball_w, p.ball_v});
    case ProblemKind::auc_solam:
      return make_auc_minimax(std::move(data), p.solam_p,
                              {p.ball_w, p.ball_v});
    case ProblemKind::robust_mean: {
      MinimaxProblem q = p;
      q.data = std::move(data);
      return q;
    }
  }
  throw std::logic_error("rebind_dataset: unknown kind");
}

/// Problem whose empirical objective *is* the population objective: moment
/// caches replaced for analytic mode, dataset swapped for test-set mode.
inline MinimaxProblem population_surrogate(const MinimaxProblem& p,
                                           const PopulationModel& pop) {
  if (pop.mode == PopulationModel::Mode::test_set)
    return rebind_dataset(p, pop.test);
  switch (p.kind) {
    case ProblemKind::quadratic_scsc: {
      if (pop.mu_z2.size() != p.primal_dim || pop.mu_z3.size() != p.primal_dim)
        throw std::invalid_argument("population moments: dimension mismatch");
      MinimaxProblem q = p;
      q.quad_mean_z1 = pop.mu_z1;
      q.quad_mean_z2 = pop.mu_z2;
      q.quad_mean_z3 = pop.mu_z3;
      return q;
    }
    case ProblemKind::bilinear_cc: {
      if (pop.second_moment.size() != p.primal_dim * p.primal_dim)
        throw std::invalid_argument("population moments: dimension mismatch");
      MinimaxProblem q = p;
      q.bilinear_m = pop.second_moment;
      return q;
    }
    default:
      throw unsupported_operation(
          "analytic population objective is only known for the synthetic "
          "quadratic and bilinear families");
  }
}

struct ValueWithError {
  double value = 0.0;
  double stderr_ = 0.0;
};

/// F(w, v): exact under analytic moments, sample mean with a standard error
/// under a test set.
inline ValueWithError population_risk(const MinimaxProblem& p,
                                      const PopulationModel& pop,
                                      const Point& pt) {
  if (pop.mode == PopulationModel::Mode::analytic) {
    const MinimaxProblem surrogate = population_surrogate(p, pop);
    return {empirical_value(surrogate, pt), 0.0};
  }
  const MinimaxProblem surrogate = rebind_dataset(p, pop.test);
  const std::size_t m = surrogate.n();
  double mean = 0.0;
  std::vector<double> vals;
  vals.reserve(m);
  for (const Example& z : surrogate.data.examples) {
    vals.push_back(f_value(surrogate, pt, z));
    mean += vals.back();
  }
  mean /= static_cast<double>(m);
  double var = 0.0;
  for (double v : vals) var += (v - mean) * (v - mean);
  var = m > 1 ? var / static_cast<double>(m - 1) : 0.0;
  return {mean, std::sqrt(var / static_cast<double>(m))};
}

/// The performance measures of a realized iterate: empirical and population
/// objective values, PD gaps on both, primal risks, and the plain
/// generalization gap with its decomposition terms.
struct RiskReport {
  double f_emp = 0.0;
  double f_pop = 0.0;
  double f_pop_stderr = 0.0;
  double weak_pd_emp = 0.0;
  double weak_pd_pop = 0.0;
  double weak_pd_gen = 0.0;  // weak_pd_pop - weak_pd_emp
  double strong_pd_emp = 0.0;
  double primal_emp = 0.0;
  double primal_pop = 0.0;
  double gap_plain = 0.0;  // f_pop - f_emp
  double inner_residual = 0.0;
  bool reliable = true;
  std::string pop_method;  // "analytic" | "monte-carlo"
};

inline RiskReport generalization_gap(const MinimaxProblem& p,
                                     const PopulationModel& pop,
                                     const Point& pt,
                                     const InnerSolverConfig& cfg = {}) {
  RiskReport r;
  r.f_emp = empirical_value(p, pt);
  const ValueWithError pv = population_risk(p, pop, pt);
  r.f_pop = pv.value;
  r.f_pop_stderr = pv.stderr_;
  r.gap_plain = r.f_pop - r.f_emp;
  r.pop_method =
      pop.mode == PopulationModel::Mode::analytic ? "analytic" : "monte-carlo";

  const GapResult emp_gap = empirical_weak_pd_gap(p, pt, cfg);
  r.weak_pd_emp = emp_gap.value;
  const MinimaxProblem surrogate = population_surrogate(
      p, pop.mode == PopulationModel::Mode::analytic
             ? pop
             : PopulationModel::from_test_set(pop.test));
  const GapResult pop_gap = empirical_weak_pd_gap(surrogate, pt, cfg);
  r.weak_pd_pop = pop_gap.value;
  r.weak_pd_gen = r.weak_pd_pop - r.weak_pd_emp;

  const GapResult strong = strong_pd_empirical_risk(p, pt, cfg);
  r.strong_pd_emp = strong.value;
  r.primal_emp = empirical_primal_risk(p, pt.w, cfg).value;
  r.primal_pop = empirical_primal_risk(surrogate, pt.w, cfg).value;
  r.inner_residual = std::max({emp_gap.inner_residual, pop_gap.inner_residual,
                               strong.inner_residual});
  r.reliable = emp_gap.reliable && pop_gap.reliable && strong.reliable;
  return r;
}

struct PlGapResult {
  double lhs = 0.0;           // |mean(F(u_S) - F_S(u_S))| over resamples
  double lhs_stderr = 0.0;
  double rhs = 0.0;           // 2 G^2 / (n rho) + distance term
  double distance_term = 0.0; // 2 G mean ||u_S - proj onto stationary set||
  double beta1 = 0.0;
  double beta2 = 0.0;
  double g_used = 0.0;
};

/// Gradient-dominance gap check for the quadratic family, whose two-sided
/// PL moduli are analytically beta1 = beta2 = rho and whose stationary set
/// is the lone empirical saddle. Resamples datasets, runs `algo` (default:
/// the exact saddle) and compares the mean plain gap against the formula.
inline PlGapResult verify_pl_gap(
    const std::function<MinimaxProblem(std::uint64_t)>& problem_per_resample,
    const PopulationModel& pop, int resamples, std::uint64_t seed,
    const std::function<Point(const MinimaxProblem&)>& algo = {}) {
  if (resamples < 2)
    throw std::invalid_argument("verify_pl_gap: resamples must be >= 2");
  std::vector<double> gaps;
  gaps.reserve(static_cast<std::size_t>(resamples));
  double dist_mean = 0.0, g_max = 0.0, rho = 0.0;
  std::size_t n = 0;
  for (int r = 0; r < resamples; ++r) {
    const MinimaxProblem prob =
        problem_per_resample(derive_seed(seed, static_cast<std::uint64_t>(r)));
    if (prob.kind != ProblemKind::quadratic_scsc)
      throw unsupported_operation(
          "verify_pl_gap: two-sided PL moduli only known analytically for "
          "quadratic-scsc");
    const Point u = algo ? algo(prob) : empirical_saddle(prob).pt;
    const double f_pop = population_risk(prob, pop, u).value;
    const double f_emp = empirical_value(prob, u);
    gaps.push_back(f_pop - f_emp);
    dist_mean += joint_norm(u, empirical_saddle(prob).pt);
    g_max = std::max(g_max, prob.lipschitz_g);
    rho = prob.sc_rho;
    n = prob.n();
  }
  dist_mean /= static_cast<double>(resamples);
  double mean = 0.0;
  for (double g : gaps) mean += g;
  mean /= static_cast<double>(resamples);
  double var = 0.0;
  for (double g : gaps) var += (g - mean) * (g - mean);
  var /= static_cast<double>(resamples - 1);

  PlGapResult out;
  out.lhs = std::fabs(mean);
  out.lhs_stderr = std::sqrt(var / static_cast<double>(resamples));
  out.beta1 = rho;
  out.beta2 = rho;
  out.g_used = g_max;
  out.distance_term = 2.0 * g_max * dist_mean;
  out.rhs = 2.0 * g_max * g_max /
                (static_cast<double>(n) * std::min(out.beta1, out.beta2)) +
            out.distance_term;
  return out;
}

}  // namespace minimax
