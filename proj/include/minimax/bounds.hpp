#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "minimax/errors.hpp"

namespace minimax {
namespace bounds {

/// A bound request: formula name plus its scalar parameters. The two
/// sequence-shaped parameters (per-step eta_t / rho_t for the diminishing
/// weak-convexity bound) ride alongside the scalar map.
struct BoundQuery {
  std::string name;
  std::map<std::string, double> params;
  std::vector<double> eta_seq;
  std::vector<double> rho_seq;
};

namespace detail {

inline double need(const BoundQuery& q, const std::string& key) {
  const auto it = q.params.find(key);
  if (it == q.params.end())
    throw config_error("bound '" + q.name + "' missing parameter '" + key +
                       "'");
  return it->second;
}

inline double need_pos(const BoundQuery& q, const std::string& key) {
  const double v = need(q, key);
  if (!(v > 0.0))
    throw config_error("bound '" + q.name + "': parameter '" + key +
                       "' must be > 0");
  return v;
}

inline double need_delta(const BoundQuery& q) {
  const double d = need(q, "delta");
  if (!(d > 0.0 && d < 1.0))
    throw config_error("bound '" + q.name + "': delta must be in (0,1)");
  return d;
}

inline double opt(const BoundQuery& q, const std::string& key, double fallback) {
  const auto it = q.params.find(key);
  return it == q.params.end() ? fallback : it->second;
}

constexpr double kE = 2.718281828459045235360287471352662498;

}  // namespace detail

/// Argument-stability of the simultaneous method after t steps, constant
/// eta, Lipschitz case: 4 eta G (sqrt(t) + t/n).
inline double argstab_cc_nonsmooth(double eta, double g, double t, double n) {
  return 4.0 * eta * g * (std::sqrt(t) + t / n);
}

/// Smooth variant with arbitrary step sums:
/// sqrt(8e(1+t/n)) G/sqrt(n) * exp(L^2 sum(eta^2)/2) * sqrt(sum(eta^2)).
/// The exponential is accumulated in log space.
inline double argstab_cc_smooth(double g, double l, double t, double n,
                                double sum_eta_sq) {
  const double log_val = 0.5 * std::log(8.0 * detail::kE * (1.0 + t / n)) +
                         std::log(g) - 0.5 * std::log(n) +
                         0.5 * l * l * sum_eta_sq + 0.5 * std::log(sum_eta_sq);
  return std::exp(log_val);
}

/// High-probability Lipschitz variant:
/// sqrt(8e) G eta (sqrt(t) + t/n + log(1/delta) + sqrt(2 t log(1/delta)/n)).
inline double argstab_cc_nonsmooth_hp(double eta, double g, double t, double n,
                                      double delta) {
  const double lg = std::log(1.0 / delta);
  return std::sqrt(8.0 * detail::kE) * g * eta *
         (std::sqrt(t) + t / n + lg + std::sqrt(2.0 * t * lg / n));
}

/// High-probability smooth variant:
/// sqrt(8e) G eta exp(L^2 t eta^2/2) (1 + t/n + log(1/delta) + sqrt(2 t log(1/delta)/n)).
inline double argstab_cc_smooth_hp(double eta, double g, double l, double t,
                                   double n, double delta) {
  const double lg = std::log(1.0 / delta);
  const double tail = 1.0 + t / n + lg + std::sqrt(2.0 * t * lg / n);
  const double log_val = 0.5 * std::log(8.0 * detail::kE) + std::log(g) +
                         std::log(eta) + 0.5 * l * l * t * eta * eta +
                         std::log(tail);
  return std::exp(log_val);
}

/// Strongly-convex-strongly-concave stability with eta_t = 1/(rho t):
/// (2 sqrt(2) G / rho) sqrt(log(e t)/t + 1/(n(n-2))).
inline double argstab_scsc(double g, double rho, double t, double n) {
  return 2.0 * std::sqrt(2.0) * g / rho *
         std::sqrt(std::log(detail::kE * t) / t + 1.0 / (n * (n - 2.0)));
}

/// Averaged-iterate optimization error, constant eta, Lipschitz case:
/// eta G^2 + (B_W^2+B_V^2)/(2 eta T) + G (B_W+B_V)/sqrt(T).
inline double opt_err_cc(double eta, double g, double t_total, double bw,
                         double bv) {
  return eta * g * g + (bw * bw + bv * bv) / (2.0 * eta * t_total) +
         g * (bw + bv) / std::sqrt(t_total);
}

/// Averaged-iterate optimization error with eta_t = 1/(rho t):
/// G^2 log(eT)/(rho T) + (B_W+B_V) G / sqrt(T).
inline double opt_err_scsc(double g, double rho, double t_total, double bw,
                           double bv) {
  return g * g * std::log(detail::kE * t_total) / (rho * t_total) +
         (bw + bv) * g / std::sqrt(t_total);
}

/// Shifted variant, eta_t = 1/(rho (t+t0)):
/// 2 rho t0 (B_W^2+B_V^2)/T + G^2 log(eT)/(rho T).
inline double opt_err_scsc_shifted(double g, double rho, double t_total,
                                   double bw, double bv, double t0) {
  return 2.0 * rho * t0 * (bw * bw + bv * bv) / t_total +
         g * g * std::log(detail::kE * t_total) / (rho * t_total);
}

/// Weak PD population risk, constant eta, Lipschitz case: the stability term
/// 4 sqrt(2) eta G^2 (sqrt(T) + T/n) plus opt_err_cc.
inline double weak_pd_risk_cc(double eta, double g, double t_total, double n,
                              double bw, double bv) {
  return 4.0 * std::sqrt(2.0) * eta * g * g *
             (std::sqrt(t_total) + t_total / n) +
         opt_err_cc(eta, g, t_total, bw, bv);
}

/// Smooth weak PD population risk:
/// 4 sqrt(e(T+T^2/n)) G^2 eta exp(L T eta^2/2)/sqrt(n) + opt_err_cc.
/// (The exponent here carries L to the first power; the excess-primal bound
/// below carries L^2. Both are evaluated exactly as stated.)
inline double weak_pd_risk_cc_smooth(double eta, double g, double l,
                                     double t_total, double n, double bw,
                                     double bv) {
  const double log_gen =
      0.5 * std::log(detail::kE * (t_total + t_total * t_total / n)) +
      std::log(4.0) + 2.0 * std::log(g) + std::log(eta) +
      0.5 * l * t_total * eta * eta - 0.5 * std::log(n);
  return std::exp(log_gen) + opt_err_cc(eta, g, t_total, bw, bv);
}

/// Excess primal risk under strong concavity of the dual:
/// (1+L/rho) sqrt(32 e (T+T^2/n)) G^2 eta exp(L^2 T eta^2/2)/sqrt(n) + opt_err_cc.
inline double excess_primal_smooth(double eta, double g, double l, double rho,
                                   double t_total, double n, double bw,
                                   double bv) {
  const double log_gen =
      std::log1p(l / rho) +
      0.5 * std::log(32.0 * detail::kE * (t_total + t_total * t_total / n)) +
      2.0 * std::log(g) + std::log(eta) + 0.5 * l * l * t_total * eta * eta -
      0.5 * std::log(n);
  return std::exp(log_gen) + opt_err_cc(eta, g, t_total, bw, bv);
}

/// Stability-to-primal-generalization multiplier: (1 + L/rho) G eps.
inline double stab_to_primal_gen(double g, double l, double rho, double eps) {
  return (1.0 + l / rho) * g * eps;
}

/// Stability-to-strong-PD-generalization multiplier: (1 + L/rho) G sqrt(2) eps.
inline double stab_to_strong_gen(double g, double l, double rho, double eps) {
  return (1.0 + l / rho) * g * std::sqrt(2.0) * eps;
}

/// Weakly-convex-weakly-concave weak generalization, eta_t = c/t:
/// 8 (sqrt(e) c G^2 / sqrt(2 c rho + 1) (1 + sqrt(T)/n) T^{c rho})^{2/(2 c rho + 3)}
///   * (1/n)^{(2 c rho + 1)/(2 c rho + 3)}.
inline double wcwc_weak_gen(double c, double g, double rho, double t_total,
                            double n) {
  const double cr = c * rho;
  const double log_inner = 0.5 + std::log(c) + 2.0 * std::log(g) -
                           0.5 * std::log(2.0 * cr + 1.0) +
                           std::log1p(std::sqrt(t_total) / n) +
                           cr * std::log(t_total);
  const double log_val = std::log(8.0) +
                         (2.0 / (2.0 * cr + 3.0)) * log_inner -
                         ((2.0 * cr + 1.0) / (2.0 * cr + 3.0)) * std::log(n);
  return std::exp(log_val);
}

/// Alternating-method weak generalization with eta_{w,t}+eta_{v,t} <= c/t:
/// 16 (G^2/(4L))^{1/(cL+1)} T^{cL/(cL+1)} / n.
inline double agda_weak_gen(double c, double g, double l, double t_total,
                            double n) {
  const double cl = c * l;
  const double log_val = std::log(16.0) +
                         (std::log(g * g / (4.0 * l))) / (cl + 1.0) +
                         (cl / (cl + 1.0)) * std::log(t_total) - std::log(n);
  return std::exp(log_val);
}

/// Varying weak-convexity weak generalization with user-supplied sequences:
/// (2 sqrt(2) G / sqrt(n)) sqrt( sum_t (eta_t^2 + 1/n)
///     exp( sum_{k>t} (2 rho_k eta_k + (L^2+1) eta_k^2) ) ).
inline double wcwc_diminishing_gen(double g, double l, double n,
                                   const std::vector<double>& eta,
                                   const std::vector<double>& rho) {
  if (eta.empty() || eta.size() != rho.size())
    throw config_error(
        "bound 'wcwc_diminishing_gen': eta and rho sequences must be nonempty "
        "and of equal length");
  const std::size_t t_total = eta.size();
  // log-space accumulation: term_t = log(eta_t^2 + 1/n) + suffix_t where
  // suffix_t = sum_{k=t+1..T} (2 rho_k eta_k + (L^2+1) eta_k^2)
  std::vector<double> log_terms(t_total);
  double suffix = 0.0;
  double log_max = -std::numeric_limits<double>::infinity();
  for (std::size_t t = t_total; t-- > 0;) {
    log_terms[t] = std::log(eta[t] * eta[t] + 1.0 / n) + suffix;
    log_max = std::max(log_max, log_terms[t]);
    suffix += 2.0 * rho[t] * eta[t] + (l * l + 1.0) * eta[t] * eta[t];
  }
  double sum = 0.0;
  for (double lt : log_terms) sum += std::exp(lt - log_max);
  const double log_total = log_max + std::log(sum);
  return 2.0 * std::sqrt(2.0) * g / std::sqrt(n) * std::exp(0.5 * log_total);
}

/// Gradient-dominance gap: 2 G^2/n max(1/beta1, 1/beta2) + 2 G dist.
inline double pl_gap(double g, double n, double beta1, double beta2,
                     double dist) {
  return 2.0 * g * g / n * std::max(1.0 / beta1, 1.0 / beta2) +
         2.0 * g * dist;
}

inline std::vector<std::string> names() {
  return {"argstab_cc_nonsmooth", "argstab_cc_smooth",
          "argstab_cc_nonsmooth_hp", "argstab_cc_smooth_hp",
          "argstab_scsc", "weak_pd_risk_cc", "weak_pd_risk_cc_smooth",
          "excess_primal_smooth", "opt_err_cc", "opt_err_scsc",
          "stab_to_primal_gen", "stab_to_strong_gen", "wcwc_weak_gen",
          "agda_weak_gen", "wcwc_diminishing_gen", "pl_gap"};
}

/// Evaluate a named bound. Scalar parameters use the keys
/// eta, c, t, T, n, G, L, rho, bw, bv, t0, delta, beta1, beta2, eps, dist;
/// missing parameters raise a configuration error naming the symbol.
inline double eval(const BoundQuery& q) {
  using detail::need;
  using detail::need_delta;
  using detail::need_pos;
  if (q.name == "argstab_cc_nonsmooth")
    return argstab_cc_nonsmooth(need(q, "eta"), need(q, "G"),
                                need_pos(q, "t"), need_pos(q, "n"));
  if (q.name == "argstab_cc_smooth") {
    const double t = need_pos(q, "t");
    const double sum_eta_sq = q.eta_seq.empty()
                                  ? t * need(q, "eta") * need(q, "eta")
                                  : [&] {
                                      double s = 0.0;
                                      for (double e : q.eta_seq) s += e * e;
                                      return s;
                                    }();
    return argstab_cc_smooth(need(q, "G"), need(q, "L"), t, need_pos(q, "n"),
                             sum_eta_sq);
  }
  if (q.name == "argstab_cc_nonsmooth_hp")
    return argstab_cc_nonsmooth_hp(need(q, "eta"), need(q, "G"),
                                   need_pos(q, "t"), need_pos(q, "n"),
                                   need_delta(q));
  if (q.name == "argstab_cc_smooth_hp")
    return argstab_cc_smooth_hp(need(q, "eta"), need(q, "G"), need(q, "L"),
                                need_pos(q, "t"), need_pos(q, "n"),
                                need_delta(q));
  if (q.name == "argstab_scsc") {
    const double n = need_pos(q, "n");
    if (n <= 2.0)
      throw std::invalid_argument("argstab_scsc requires n > 2");
    return argstab_scsc(need(q, "G"), need_pos(q, "rho"), need_pos(q, "t"),
                        n);
  }
  if (q.name == "weak_pd_risk_cc")
    return weak_pd_risk_cc(need(q, "eta"), need(q, "G"), need_pos(q, "T"),
                           need_pos(q, "n"), need(q, "bw"), need(q, "bv"));
  if (q.name == "weak_pd_risk_cc_smooth")
    return weak_pd_risk_cc_smooth(need(q, "eta"), need(q, "G"), need(q, "L"),
                                  need_pos(q, "T"), need_pos(q, "n"),
                                  need(q, "bw"), need(q, "bv"));
  if (q.name == "excess_primal_smooth")
    return excess_primal_smooth(need(q, "eta"), need(q, "G"), need(q, "L"),
                                need_pos(q, "rho"), need_pos(q, "T"),
                                need_pos(q, "n"), need(q, "bw"),
                                need(q, "bv"));
  if (q.name == "opt_err_cc")
    return opt_err_cc(need_pos(q, "eta"), need(q, "G"), need_pos(q, "T"),
                      need(q, "bw"), need(q, "bv"));
  if (q.name == "opt_err_scsc") {
    // with t0 present this is the shifted-step variant
    if (q.params.count("t0"))
      return opt_err_scsc_shifted(need(q, "G"), need_pos(q, "rho"),
                                  need_pos(q, "T"), need(q, "bw"),
                                  need(q, "bv"), need(q, "t0"));
    return opt_err_scsc(need(q, "G"), need_pos(q, "rho"), need_pos(q, "T"),
                        need(q, "bw"), need(q, "bv"));
  }
  if (q.name == "stab_to_primal_gen")
    return stab_to_primal_gen(need(q, "G"), need(q, "L"), need_pos(q, "rho"),
                              need(q, "eps"));
  if (q.name == "stab_to_strong_gen")
    return stab_to_strong_gen(need(q, "G"), need(q, "L"), need_pos(q, "rho"),
                              need(q, "eps"));
  if (q.name == "wcwc_weak_gen")
    return wcwc_weak_gen(need_pos(q, "c"), need(q, "G"), need_pos(q, "rho"),
                         need_pos(q, "T"), need_pos(q, "n"));
  if (q.name == "agda_weak_gen")
    return agda_weak_gen(need_pos(q, "c"), need(q, "G"), need_pos(q, "L"),
                         need_pos(q, "T"), need_pos(q, "n"));
  if (q.name == "wcwc_diminishing_gen") {
    if (!q.eta_seq.empty())
      return wcwc_diminishing_gen(need(q, "G"), need(q, "L"),
                                  need_pos(q, "n"), q.eta_seq, q.rho_seq);
    // scalar convenience form: eta_t = c/t, rho_t = rho, t = 1..T
    const long t_total = static_cast<long>(need_pos(q, "T"));
    const double c = need_pos(q, "c");
    const double rho = need(q, "rho");
    std::vector<double> eta(static_cast<std::size_t>(t_total));
    std::vector<double> rho_seq(static_cast<std::size_t>(t_total), rho);
    for (long t = 1; t <= t_total; ++t)
      eta[static_cast<std::size_t>(t - 1)] = c / static_cast<double>(t);
    return wcwc_diminishing_gen(need(q, "G"), need(q, "L"), need_pos(q, "n"),
                                eta, rho_seq);
  }
  if (q.name == "pl_gap")
    return pl_gap(need(q, "G"), need_pos(q, "n"), need_pos(q, "beta1"),
                  detail::opt(q, "beta2", need_pos(q, "beta1")),
                  detail::opt(q, "dist", 0.0));
  throw config_error("unknown bound name '" + q.name + "'");
}

}  // namespace bounds
}  // namespace minimax
