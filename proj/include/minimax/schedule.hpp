#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

#include "minimax/errors.hpp"

namespace minimax {

/// Step-size rules used by the stochastic saddle solvers:
///   constant             eta_t = eta
///   const_over_sqrt_T    eta_t = eta / sqrt(T)
///   c_over_t             eta_t = c / t
///   inv_rho_t            eta_t = 1 / (rho * t)
///   inv_rho_t_shifted    eta_t = 1 / (rho * (t + t0))
enum class ScheduleKind {
  constant,
  const_over_sqrt_T,
  c_over_t,
  inv_rho_t,
  inv_rho_t_shifted,
};

struct Schedule {
  ScheduleKind kind = ScheduleKind::constant;
  double eta = 0.0;  // constant / const_over_sqrt_T
  double c = 0.0;    // c_over_t
  double rho = 0.0;  // inv_rho_t(_shifted)
  double t0 = 0.0;   // inv_rho_t_shifted

  static Schedule constant(double eta) {
    if (!(eta > 0.0)) throw config_error("schedule: eta must be > 0");
    Schedule s;
    s.kind = ScheduleKind::constant;
    s.eta = eta;
    return s;
  }
  static Schedule const_over_sqrt_T(double eta) {
    if (!(eta > 0.0)) throw config_error("schedule: eta must be > 0");
    Schedule s;
    s.kind = ScheduleKind::const_over_sqrt_T;
    s.eta = eta;
    return s;
  }
  static Schedule c_over_t(double c) {
    if (!(c > 0.0)) throw config_error("schedule: c must be > 0");
    Schedule s;
    s.kind = ScheduleKind::c_over_t;
    s.c = c;
    return s;
  }
  static Schedule inv_rho_t(double rho) {
    if (!(rho > 0.0)) throw config_error("schedule: rho must be > 0");
    Schedule s;
    s.kind = ScheduleKind::inv_rho_t;
    s.rho = rho;
    return s;
  }
  static Schedule inv_rho_t_shifted(double rho, double t0) {
    if (!(rho > 0.0)) throw config_error("schedule: rho must be > 0");
    if (!(t0 >= 0.0)) throw config_error("schedule: t0 must be >= 0");
    Schedule s;
    s.kind = ScheduleKind::inv_rho_t_shifted;
    s.rho = rho;
    s.t0 = t0;
    return s;
  }
};

/// eta_t for iteration t in [1, T].
inline double schedule_eval(const Schedule& s, long t, long T) {
  if (t < 1 || t > T)
    throw std::invalid_argument("schedule_eval: t out of range [1, T]");
  switch (s.kind) {
    case ScheduleKind::constant:
      return s.eta;
    case ScheduleKind::const_over_sqrt_T:
      return s.eta / std::sqrt(static_cast<double>(T));
    case ScheduleKind::c_over_t:
      return s.c / static_cast<double>(t);
    case ScheduleKind::inv_rho_t:
      return 1.0 / (s.rho * static_cast<double>(t));
    case ScheduleKind::inv_rho_t_shifted:
      return 1.0 / (s.rho * (static_cast<double>(t) + s.t0));
  }
  throw std::logic_error("schedule_eval: unknown kind");
}

inline std::string schedule_kind_name(ScheduleKind k) {
  switch (k) {
    case ScheduleKind::constant: return "constant";
    case ScheduleKind::const_over_sqrt_T: return "const-over-sqrtT";
    case ScheduleKind::c_over_t: return "c-over-t";
    case ScheduleKind::inv_rho_t: return "inv-rho-t";
    case ScheduleKind::inv_rho_t_shifted: return "inv-rho-t-shifted";
  }
  return "?";
}

inline ScheduleKind schedule_kind_from_name(const std::string& name) {
  if (name == "constant") return ScheduleKind::constant;
  if (name == "const-over-sqrtT") return ScheduleKind::const_over_sqrt_T;
  if (name == "c-over-t") return ScheduleKind::c_over_t;
  if (name == "inv-rho-t") return ScheduleKind::inv_rho_t;
  if (name == "inv-rho-t-shifted") return ScheduleKind::inv_rho_t_shifted;
  throw config_error("schedule.kind: unknown value '" + name + "'");
}

}  // namespace minimax
