#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>

#include "minimax/dataset.hpp"
#include "minimax/errors.hpp"
#include "minimax/rng.hpp"
#include "minimax/vec.hpp"

namespace minimax {

enum class ProblemKind { quadratic_scsc, bilinear_cc, auc_solam, robust_mean };

/// How a problem constant was obtained: closed form from radii and data
/// norms, or sampled and inflated by 1.1.
enum class ConstantSource { analytic, sampled };

inline std::string problem_kind_name(ProblemKind k) {
  switch (k) {
    case ProblemKind::quadratic_scsc: return "quadratic-scsc";
    case ProblemKind::bilinear_cc: return "bilinear-cc";
    case ProblemKind::auc_solam: return "auc-solam";
    case ProblemKind::robust_mean: return "robust-mean";
  }
  return "?";
}

inline ProblemKind problem_kind_from_name(const std::string& name) {
  if (name == "quadratic-scsc") return ProblemKind::quadratic_scsc;
  if (name == "bilinear-cc") return ProblemKind::bilinear_cc;
  if (name == "auc-solam") return ProblemKind::auc_solam;
  if (name == "robust-mean") return ProblemKind::robust_mean;
  throw config_error("problem.kind: unknown value '" + name + "'");
}

/// A stochastic minimax objective over a fixed dataset: per-example value
/// and gradient oracles plus the constants the theory consumes. Immutable
/// after construction; all oracles are pure.
struct MinimaxProblem {
  ProblemKind kind = ProblemKind::quadratic_scsc;
  std::size_t primal_dim = 0;
  std::size_t dual_dim = 0;
  double ball_w = std::numeric_limits<double>::infinity();
  double ball_v = std::numeric_limits<double>::infinity();

  double lipschitz_g = std::numeric_limits<double>::quiet_NaN();
  ConstantSource g_source = ConstantSource::analytic;
  double smooth_l = std::numeric_limits<double>::quiet_NaN();  // NaN = unknown
  ConstantSource l_source = ConstantSource::analytic;
  double sc_rho = 0.0;  // strong-convexity-concavity modulus
  double wc_rho = 0.0;  // weak-convexity-concavity modulus (sampled when > 0)

  Dataset data;

  // family parameters / caches
  double quad_rho = 0.0;                  // quadratic-scsc
  double quad_mean_z1 = 0.0;              // mean coupling
  Vec quad_mean_z2, quad_mean_z3;         // mean linear terms
  std::vector<double> bilinear_m;         // (1/n) sum z z^T, row-major
  double solam_p = 0.5;                   // positive-class probability

  std::size_t n() const { return data.n(); }
  bool has_smooth_l() const { return std::isfinite(smooth_l); }
};

struct GradPair {
  Vec gw;
  Vec gv;
};

namespace detail {

inline double sgn0(double t) { return t > 0.0 ? 1.0 : (t < 0.0 ? -1.0 : 0.0); }

inline void check_point(const MinimaxProblem& p, const Point& pt) {
  if (pt.w.size() != p.primal_dim || pt.v.size() != p.dual_dim)
    throw std::invalid_argument("point dimension mismatch for problem");
}

inline void check_example(const MinimaxProblem& p, const Example& z) {
  std::size_t want = 0;
  switch (p.kind) {
    case ProblemKind::quadratic_scsc: want = 1 + 2 * p.primal_dim; break;
    case ProblemKind::bilinear_cc: want = p.primal_dim; break;
    case ProblemKind::auc_solam: want = p.primal_dim - 2; break;
    case ProblemKind::robust_mean: want = p.primal_dim; break;
  }
  if (z.features.size() != want)
    throw std::invalid_argument("example dimension mismatch for problem");
}

inline void split_quad_example(const MinimaxProblem& p, const Example& z,
                               double& z1, const double*& z2,
                               const double*& z3) {
  z1 = z.features[0];
  z2 = z.features.data() + 1;
  z3 = z.features.data() + 1 + p.primal_dim;
}

}  // namespace detail

/// Truncated loss for the robust estimation objective.
inline double psi_truncated(double x) {
  return std::log(1.0 + std::fabs(x) + 0.5 * x * x) * detail::sgn0(x);
}

inline double psi_truncated_deriv(double x) {
  const double a = std::fabs(x);
  return (1.0 + a) / (1.0 + a + 0.5 * x * x);
}

/// Per-example objective value f(w, v; z).
inline double f_value(const MinimaxProblem& p, const Point& pt,
                      const Example& z) {
  detail::check_point(p, pt);
  detail::check_example(p, z);
  switch (p.kind) {
    case ProblemKind::quadratic_scsc: {
      double z1;
      const double *z2, *z3;
      detail::split_quad_example(p, z, z1, z2, z3);
      double lin = 0.0, wv = 0.0;
      for (std::size_t i = 0; i < p.primal_dim; ++i) {
        lin += z2[i] * pt.w[i] - z3[i] * pt.v[i];
        wv += pt.w[i] * pt.v[i];
      }
      return 0.5 * p.quad_rho * dot(pt.w, pt.w) + z1 * wv -
             0.5 * p.quad_rho * dot(pt.v, pt.v) + lin;
    }
    case ProblemKind::bilinear_cc:
      return dot(pt.w, z.features) * dot(pt.v, z.features);
    case ProblemKind::auc_solam: {
      const std::size_t d = p.primal_dim - 2;
      double h = 0.0;
      for (std::size_t i = 0; i < d; ++i) h += pt.w[i] * z.features[i];
      const double a = pt.w[d], b = pt.w[d + 1], alpha = pt.v[0];
      if (z.label > 0.0) {
        const double c = 1.0 / p.solam_p;
        return (h - a) * (h - a) * c - 2.0 * (1.0 + alpha) * h * c -
               alpha * alpha;
      }
      const double c = 1.0 / (1.0 - p.solam_p);
      return (h - b) * (h - b) * c + 2.0 * (1.0 + alpha) * h * c -
             alpha * alpha;
    }
    case ProblemKind::robust_mean: {
      const double rw = dot(pt.w, z.features) - z.label;
      const double rv = dot(pt.v, z.features) - z.label;
      return psi_truncated(std::fabs(rw) - std::fabs(rv));
    }
  }
  throw std::logic_error("f_value: unknown kind");
}

/// Analytic partial gradients of f(w, v; z). Deterministic; the absolute
/// losses of robust-mean use subgradient 0 at their kinks.
inline GradPair grad(const MinimaxProblem& p, const Point& pt,
                     const Example& z) {
  detail::check_point(p, pt);
  detail::check_example(p, z);
  GradPair g;
  g.gw = zeros(p.primal_dim);
  g.gv = zeros(p.dual_dim);
  switch (p.kind) {
    case ProblemKind::quadratic_scsc: {
      double z1;
      const double *z2, *z3;
      detail::split_quad_example(p, z, z1, z2, z3);
      for (std::size_t i = 0; i < p.primal_dim; ++i) {
        g.gw[i] = p.quad_rho * pt.w[i] + z1 * pt.v[i] + z2[i];
        g.gv[i] = z1 * pt.w[i] - p.quad_rho * pt.v[i] - z3[i];
      }
      return g;
    }
    case ProblemKind::bilinear_cc: {
      const double hw = dot(pt.w, z.features);
      const double hv = dot(pt.v, z.features);
      for (std::size_t i = 0; i < p.primal_dim; ++i) {
        g.gw[i] = hv * z.features[i];
        g.gv[i] = hw * z.features[i];
      }
      return g;
    }
    case ProblemKind::auc_solam: {
      const std::size_t d = p.primal_dim - 2;
      double h = 0.0;
      for (std::size_t i = 0; i < d; ++i) h += pt.w[i] * z.features[i];
      const double a = pt.w[d], b = pt.w[d + 1], alpha = pt.v[0];
      double dfdh, dfda = 0.0, dfdb = 0.0, dfdalpha;
      if (z.label > 0.0) {
        const double c = 1.0 / p.solam_p;
        dfdh = 2.0 * (h - a) * c - 2.0 * (1.0 + alpha) * c;
        dfda = -2.0 * (h - a) * c;
        dfdalpha = -2.0 * h * c - 2.0 * alpha;
      } else {
        const double c = 1.0 / (1.0 - p.solam_p);
        dfdh = 2.0 * (h - b) * c + 2.0 * (1.0 + alpha) * c;
        dfdb = -2.0 * (h - b) * c;
        dfdalpha = 2.0 * h * c - 2.0 * alpha;
      }
      for (std::size_t i = 0; i < d; ++i) g.gw[i] = dfdh * z.features[i];
      g.gw[d] = dfda;
      g.gw[d + 1] = dfdb;
      g.gv[0] = dfdalpha;
      return g;
    }
    case ProblemKind::robust_mean: {
      const double rw = dot(pt.w, z.features) - z.label;
      const double rv = dot(pt.v, z.features) - z.label;
      const double u = std::fabs(rw) - std::fabs(rv);
      const double du = psi_truncated_deriv(u);
      const double cw = du * detail::sgn0(rw);
      const double cv = -du * detail::sgn0(rv);
      for (std::size_t i = 0; i < p.primal_dim; ++i) {
        g.gw[i] = cw * z.features[i];
        g.gv[i] = cv * z.features[i];
      }
      return g;
    }
  }
  throw std::logic_error("grad: unknown kind");
}

namespace detail {

inline Vec matvec(const std::vector<double>& m_rowmajor, const Vec& x) {
  const std::size_t d = x.size();
  Vec r(d, 0.0);
  for (std::size_t i = 0; i < d; ++i) {
    double s = 0.0;
    const double* row = m_rowmajor.data() + i * d;
    for (std::size_t j = 0; j < d; ++j) s += row[j] * x[j];
    r[i] = s;
  }
  return r;
}

}  // namespace detail

/// Empirical objective F_S(w, v). Quadratic and bilinear kinds use cached
/// data moments; the others average per-example values.
inline double empirical_value(const MinimaxProblem& p, const Point& pt) {
  detail::check_point(p, pt);
  switch (p.kind) {
    case ProblemKind::quadratic_scsc: {
      double lin = 0.0, wv = 0.0;
      for (std::size_t i = 0; i < p.primal_dim; ++i) {
        lin += p.quad_mean_z2[i] * pt.w[i] - p.quad_mean_z3[i] * pt.v[i];
        wv += pt.w[i] * pt.v[i];
      }
      return 0.5 * p.quad_rho * dot(pt.w, pt.w) + p.quad_mean_z1 * wv -
             0.5 * p.quad_rho * dot(pt.v, pt.v) + lin;
    }
    case ProblemKind::bilinear_cc:
      return dot(pt.w, detail::matvec(p.bilinear_m, pt.v));
    default: {
      double s = 0.0;
      for (const Example& z : p.data.examples) s += f_value(p, pt, z);
      return s / static_cast<double>(p.n());
    }
  }
}

/// Full-batch gradients of F_S.
inline GradPair empirical_grad(const MinimaxProblem& p, const Point& pt) {
  detail::check_point(p, pt);
  switch (p.kind) {
    case ProblemKind::quadratic_scsc: {
      GradPair g;
      g.gw = zeros(p.primal_dim);
      g.gv = zeros(p.dual_dim);
      for (std::size_t i = 0; i < p.primal_dim; ++i) {
        g.gw[i] = p.quad_rho * pt.w[i] + p.quad_mean_z1 * pt.v[i] +
                  p.quad_mean_z2[i];
        g.gv[i] = p.quad_mean_z1 * pt.w[i] - p.quad_rho * pt.v[i] -
                  p.quad_mean_z3[i];
      }
      return g;
    }
    case ProblemKind::bilinear_cc: {
      GradPair g;
      g.gw = detail::matvec(p.bilinear_m, pt.v);
      g.gv = detail::matvec(p.bilinear_m, pt.w);
      return g;
    }
    default: {
      GradPair acc;
      acc.gw = zeros(p.primal_dim);
      acc.gv = zeros(p.dual_dim);
      for (const Example& z : p.data.examples) {
        const GradPair g = grad(p, pt, z);
        axpy(1.0, g.gw, acc.gw);
        axpy(1.0, g.gv, acc.gv);
      }
      const double inv = 1.0 / static_cast<double>(p.n());
      scale(acc.gw, inv);
      scale(acc.gv, inv);
      return acc;
    }
  }
}

/// Uniform-ish random feasible point (gaussian direction, radial density).
/// Infinite radii fall back to a sampling radius of 5.
inline Point sample_feasible_point(const MinimaxProblem& p, RngStream& rng) {
  auto sample_ball = [&rng](std::size_t dim, double radius) {
    const double r_eff = std::isfinite(radius) ? radius : 5.0;
    Vec x(dim);
    for (double& e : x) e = rng.next_gaussian();
    const double n = norm2(x);
    if (n > 0.0) {
      const double r =
          r_eff * std::pow(rng.next_unit(), 1.0 / static_cast<double>(dim));
      scale(x, r / n);
    }
    return x;
  };
  Point pt;
  pt.w = sample_ball(p.primal_dim, p.ball_w);
  pt.v = sample_ball(p.dual_dim, p.ball_v);
  return pt;
}

namespace detail {

inline void sample_lipschitz_g(MinimaxProblem& p) {
  if (!std::isfinite(p.ball_w) || !std::isfinite(p.ball_v)) {
    p.lipschitz_g = std::numeric_limits<double>::infinity();
    p.g_source = ConstantSource::sampled;
    return;
  }
  RngStream rng(0x5EEDFACEULL);
  double best = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const Point pt = sample_feasible_point(p, rng);
    const Example& z = p.data.examples[rng.next_index(p.n())];
    const GradPair g = grad(p, pt, z);
    best = std::max(best, std::max(norm2(g.gw), norm2(g.gv)));
  }
  p.lipschitz_g = 1.1 * best;
  p.g_source = ConstantSource::sampled;
}

inline void sample_wc_rho(MinimaxProblem& p) {
  RngStream rng(0xC0FFEE11ULL);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const Point a = sample_feasible_point(p, rng);
    const Point b = sample_feasible_point(p, rng);
    const Example& z = p.data.examples[rng.next_index(p.n())];
    const GradPair ga = grad(p, a, z);
    const GradPair gb = grad(p, b, z);
    double inner = 0.0, dist_sq = 0.0;
    for (std::size_t j = 0; j < p.primal_dim; ++j) {
      const double dw = a.w[j] - b.w[j];
      inner += dw * (ga.gw[j] - gb.gw[j]);
      dist_sq += dw * dw;
    }
    for (std::size_t j = 0; j < p.dual_dim; ++j) {
      const double dv = a.v[j] - b.v[j];
      inner += dv * (gb.gv[j] - ga.gv[j]);
      dist_sq += dv * dv;
    }
    if (dist_sq > 1e-16) worst = std::max(worst, -inner / dist_sq);
  }
  p.wc_rho = worst;
}

}  // namespace detail

struct ProblemOpts {
  double ball_w = 5.0;
  double ball_v = 5.0;
};

/// f(w,v;z) = rho/2 ||w||^2 + z1 <w,v> - rho/2 ||v||^2 + <z2,w> - <z3,v>,
/// with each example packing (z1, z2, z3) as features of length 1 + 2 dim.
inline MinimaxProblem make_quadratic_scsc(double rho, std::size_t dim,
                                          Dataset data,
                                          ProblemOpts opts = {}) {
  if (!(rho > 0.0))
    throw std::invalid_argument("make_quadratic_scsc: rho must be > 0");
  data.validate();
  if (data.feature_dim() != 1 + 2 * dim)
    throw std::invalid_argument(
        "make_quadratic_scsc: features must pack (z1, z2, z3)");
  MinimaxProblem p;
  p.kind = ProblemKind::quadratic_scsc;
  p.primal_dim = dim;
  p.dual_dim = dim;
  p.ball_w = opts.ball_w;
  p.ball_v = opts.ball_v;
  p.quad_rho = rho;
  p.sc_rho = rho;
  p.data = std::move(data);

  p.quad_mean_z2 = zeros(dim);
  p.quad_mean_z3 = zeros(dim);
  double max_abs_z1 = 0.0, max_g = 0.0;
  const double inv_n = 1.0 / static_cast<double>(p.n());
  for (const Example& z : p.data.examples) {
    double z1;
    const double *z2, *z3;
    detail::split_quad_example(p, z, z1, z2, z3);
    p.quad_mean_z1 += z1 * inv_n;
    double n2 = 0.0, n3 = 0.0;
    for (std::size_t i = 0; i < dim; ++i) {
      p.quad_mean_z2[i] += z2[i] * inv_n;
      p.quad_mean_z3[i] += z3[i] * inv_n;
      n2 += z2[i] * z2[i];
      n3 += z3[i] * z3[i];
    }
    max_abs_z1 = std::max(max_abs_z1, std::fabs(z1));
    max_g = std::max(
        max_g, std::max(rho * p.ball_w + std::fabs(z1) * p.ball_v + std::sqrt(n2),
                        std::fabs(z1) * p.ball_w + rho * p.ball_v + std::sqrt(n3)));
  }
  p.lipschitz_g = max_g;
  p.g_source = ConstantSource::analytic;
  p.smooth_l = std::sqrt(rho * rho + max_abs_z1 * max_abs_z1);
  p.l_source = ConstantSource::analytic;
  return p;
}

/// f(w,v;z) = <w,z> <v,z>; convex-concave with zero curvature.
inline MinimaxProblem make_bilinear_cc(Dataset data, ProblemOpts opts = {}) {
  data.validate();
  MinimaxProblem p;
  p.kind = ProblemKind::bilinear_cc;
  p.primal_dim = data.feature_dim();
  p.dual_dim = data.feature_dim();
  p.ball_w = opts.ball_w;
  p.ball_v = opts.ball_v;
  p.data = std::move(data);

  const std::size_t d = p.primal_dim;
  p.bilinear_m.assign(d * d, 0.0);
  const double inv_n = 1.0 / static_cast<double>(p.n());
  double max_zsq = 0.0;
  for (const Example& z : p.data.examples) {
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j)
        p.bilinear_m[i * d + j] += z.features[i] * z.features[j] * inv_n;
    max_zsq = std::max(max_zsq, dot(z.features, z.features));
  }
  p.lipschitz_g = max_zsq * std::max(p.ball_w, p.ball_v);
  p.g_source = ConstantSource::analytic;
  p.smooth_l = max_zsq;
  p.l_source = ConstantSource::analytic;
  return p;
}

/// AUC maximization under the square loss with a linear scorer h(w;x)=<w,x>.
/// Primal packs (w, a, b); the dual variable alpha is scalar and the dual
/// map is exactly 2-strongly-concave.
inline MinimaxProblem make_auc_minimax(Dataset data,
                                       std::optional<double> p_override = {},
                                       ProblemOpts opts = {}) {
  data.validate();
  for (const Example& e : data.examples)
    if (e.label != 1.0 && e.label != -1.0)
      throw std::invalid_argument("make_auc_minimax: labels must be +-1");
  MinimaxProblem p;
  p.kind = ProblemKind::auc_solam;
  p.primal_dim = data.feature_dim() + 2;
  p.dual_dim = 1;
  p.ball_w = opts.ball_w;
  p.ball_v = opts.ball_v;
  const double frac = data.positive_fraction();
  if (p_override.has_value()) {
    if (!(*p_override > 0.0 && *p_override < 1.0))
      throw std::invalid_argument("make_auc_minimax: p must be in (0,1)");
    p.solam_p = *p_override;
  } else {
    if (frac <= 0.0 || frac >= 1.0)
      throw std::invalid_argument(
          "make_auc_minimax: single-class dataset needs an explicit p");
    p.solam_p = frac;
  }
  p.data = std::move(data);

  // Frobenius bound on the (constant-in-point) per-example Hessian.
  double max_l = 0.0;
  for (const Example& z : p.data.examples) {
    const double c = z.label > 0.0 ? 1.0 / p.solam_p : 1.0 / (1.0 - p.solam_p);
    const double xsq = dot(z.features, z.features);
    max_l = std::max(
        max_l,
        std::sqrt(4.0 * c * c * (xsq * xsq + 4.0 * xsq + 1.0) + 4.0));
  }
  p.smooth_l = max_l;
  p.l_source = ConstantSource::analytic;
  detail::sample_lipschitz_g(p);
  return p;
}

/// Robust location estimation: f(w,v;z) = psi(|<w,x>-y| - |<v,x>-y|) with
/// the truncated loss psi. Weakly-convex-weakly-concave; wc_rho is a
/// sampled curvature estimate.
inline MinimaxProblem make_robust_mean(Dataset data, ProblemOpts opts = {}) {
  data.validate();
  MinimaxProblem p;
  p.kind = ProblemKind::robust_mean;
  p.primal_dim = data.feature_dim();
  p.dual_dim = data.feature_dim();
  p.ball_w = opts.ball_w;
  p.ball_v = opts.ball_v;
  double max_x = 0.0;
  for (const Example& z : data.examples)
    max_x = std::max(max_x, norm2(z.features));
  p.data = std::move(data);
  p.lipschitz_g = max_x;  // |psi'| <= 1
  p.g_source = ConstantSource::analytic;
  detail::sample_wc_rho(p);
  return p;
}

struct SaddleResult {
  Point pt;
  bool boundary = false;   // closed-form saddle fell outside the balls
  double residual = 0.0;   // ||grad F_S|| (or projected residual on boundary)
};

namespace detail {

/// Deterministic extragradient on F_S for constrained saddles.
inline SaddleResult extragradient_saddle(const MinimaxProblem& p, double tol,
                                         long max_iters) {
  Point u{zeros(p.primal_dim), zeros(p.dual_dim)};
  const double l = p.has_smooth_l() ? p.smooth_l : 1.0;
  const double step = 0.5 / std::max(l, 1e-12);
  auto apply = [&](const Point& x, const Point& at) {
    const GradPair g = empirical_grad(p, at);
    Point r;
    r.w = x.w;
    axpy(-step, g.gw, r.w);
    r.w = project_ball(std::move(r.w), p.ball_w);
    r.v = x.v;
    axpy(step, g.gv, r.v);
    r.v = project_ball(std::move(r.v), p.ball_v);
    return r;
  };
  double res = std::numeric_limits<double>::infinity();
  for (long k = 0; k < max_iters; ++k) {
    const Point half = apply(u, u);
    res = joint_norm(u, half) / step;
    if (res <= tol) break;
    u = apply(u, half);
  }
  return SaddleResult{u, true, res};
}

}  // namespace detail

/// Closed-form saddle of F_S for the quadratic and bilinear families.
/// If the interior stationary point escapes the balls, flags it and falls
/// back to a high-accuracy extragradient solve.
inline SaddleResult empirical_saddle(const MinimaxProblem& p) {
  switch (p.kind) {
    case ProblemKind::quadratic_scsc: {
      const double rho = p.quad_rho, m1 = p.quad_mean_z1;
      const double det = rho * rho + m1 * m1;
      Point pt{zeros(p.primal_dim), zeros(p.dual_dim)};
      for (std::size_t i = 0; i < p.primal_dim; ++i) {
        pt.w[i] = (m1 * p.quad_mean_z3[i] - rho * p.quad_mean_z2[i]) / det;
        pt.v[i] = -(rho * p.quad_mean_z3[i] + m1 * p.quad_mean_z2[i]) / det;
      }
      if (norm2(pt.w) > p.ball_w || norm2(pt.v) > p.ball_v)
        return detail::extragradient_saddle(p, 1e-10, 1000000);
      const GradPair g = empirical_grad(p, pt);
      return SaddleResult{pt, false,
                          std::sqrt(dot(g.gw, g.gw) + dot(g.gv, g.gv))};
    }
    case ProblemKind::bilinear_cc: {
      // (0,0) is always stationary for w^T M v and interior for any radius.
      Point pt{zeros(p.primal_dim), zeros(p.dual_dim)};
      return SaddleResult{pt, false, 0.0};
    }
    default:
      throw unsupported_operation("empirical_saddle: no closed form for " +
                                  problem_kind_name(p.kind));
  }
}

}  // namespace minimax
