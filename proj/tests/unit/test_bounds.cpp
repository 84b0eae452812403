#include <catch2/catch.hpp>

#include <cmath>
#include <string>

#include "minimax/bounds.hpp"

using namespace minimax;
using bounds::BoundQuery;

namespace {

BoundQuery q(std::string name, std::map<std::string, double> params) {
  BoundQuery query;
  query.name = std::move(name);
  query.params = std::move(params);
  return query;
}

}  // namespace

TEST_CASE("frozen formula values") {
  REQUIRE(bounds::eval(q("argstab_cc_nonsmooth",
                         {{"eta", 0.01}, {"G", 1}, {"t", 100}, {"n", 100}})) ==
          Approx(0.44).margin(1e-15));
  REQUIRE(bounds::eval(q("argstab_scsc",
                         {{"G", 1}, {"rho", 1}, {"t", 1}, {"n", 100}})) ==
          Approx(2.8285714285714287).epsilon(1e-12));
  REQUIRE(bounds::eval(q("stab_to_primal_gen",
                         {{"G", 3}, {"L", 2}, {"rho", 1}, {"eps", 0}})) == 0.0);
  REQUIRE(bounds::eval(q("stab_to_strong_gen",
                         {{"G", 1}, {"L", 1}, {"rho", 1}, {"eps", 1}})) ==
          Approx(2.0 * std::sqrt(2.0)));
  REQUIRE(bounds::eval(q("pl_gap", {{"G", 2}, {"n", 100}, {"beta1", 1}})) ==
          Approx(0.08));
  REQUIRE(bounds::eval(q("pl_gap", {{"G", 2},
                                    {"n", 100},
                                    {"beta1", 1},
                                    {"beta2", 0.5},
                                    {"dist", 0.1}})) ==
          Approx(2.0 * 4.0 / 100.0 * 2.0 + 2.0 * 2.0 * 0.1));
  // zero distance term scales exactly like 1/n
  REQUIRE(bounds::eval(q("pl_gap", {{"G", 2}, {"n", 200}, {"beta1", 1}})) ==
          Approx(0.5 * bounds::eval(
                           q("pl_gap", {{"G", 2}, {"n", 100}, {"beta1", 1}})))
              .epsilon(1e-12));
}

TEST_CASE("opt_err_cc halves when T quadruples under eta = 1/sqrt(T)") {
  const double t1 = 1000.0;
  const double v1 = bounds::eval(q(
      "opt_err_cc",
      {{"eta", 1.0 / std::sqrt(t1)}, {"G", 2}, {"T", t1}, {"bw", 1}, {"bv", 1}}));
  const double v2 = bounds::eval(q("opt_err_cc", {{"eta", 1.0 / std::sqrt(4 * t1)},
                                                  {"G", 2},
                                                  {"T", 4 * t1},
                                                  {"bw", 1},
                                                  {"bv", 1}}));
  REQUIRE(v2 == Approx(0.5 * v1).epsilon(1e-12));
}

TEST_CASE("opt_err_scsc switches to the shifted variant when t0 is present") {
  const double base = bounds::eval(
      q("opt_err_scsc", {{"G", 1}, {"rho", 1}, {"T", 100}, {"bw", 1}, {"bv", 1}}));
  REQUIRE(base == Approx(std::log(std::exp(1.0) * 100.0) / 100.0 +
                         2.0 / 10.0));
  const double shifted = bounds::eval(q("opt_err_scsc", {{"G", 1},
                                                         {"rho", 1},
                                                         {"T", 100},
                                                         {"bw", 1},
                                                         {"bv", 1},
                                                         {"t0", 5}}));
  REQUIRE(shifted == Approx(2.0 * 5.0 * 2.0 / 100.0 +
                            std::log(std::exp(1.0) * 100.0) / 100.0));
}

TEST_CASE("missing parameters raise configuration errors naming the symbol") {
  try {
    bounds::eval(q("argstab_cc_nonsmooth", {{"eta", 0.01}, {"t", 100}, {"n", 100}}));
    FAIL("expected config_error");
  } catch (const config_error& e) {
    REQUIRE(std::string(e.what()).find("'G'") != std::string::npos);
  }
  REQUIRE_THROWS_AS(bounds::eval(q("no_such_bound", {})), config_error);
}

TEST_CASE("argstab_scsc rejects n <= 2") {
  REQUIRE_THROWS_AS(
      bounds::eval(q("argstab_scsc", {{"G", 1}, {"rho", 1}, {"t", 1}, {"n", 2}})),
      std::invalid_argument);
}

TEST_CASE("high-probability forms validate delta") {
  REQUIRE_THROWS_AS(
      bounds::eval(q("argstab_cc_nonsmooth_hp",
                     {{"eta", 0.1}, {"G", 1}, {"t", 10}, {"n", 10}, {"delta", 1.5}})),
      config_error);
  REQUIRE(bounds::eval(q("argstab_cc_nonsmooth_hp", {{"eta", 0.1},
                                                     {"G", 1},
                                                     {"t", 10},
                                                     {"n", 10},
                                                     {"delta", 0.05}})) > 0.0);
}

TEST_CASE("monotonicity sweeps match each formula's printed signs") {
  const auto eval_with = [](const char* name,
                            std::map<std::string, double> params) {
    return bounds::eval(q(name, std::move(params)));
  };

  SECTION("increasing in eta") {
    for (const char* name :
         {"argstab_cc_nonsmooth", "argstab_cc_smooth",
          "argstab_cc_nonsmooth_hp", "argstab_cc_smooth_hp"}) {
      double prev = 0.0;
      for (double eta : {0.001, 0.01, 0.1}) {
        const double v = eval_with(name, {{"eta", eta},
                                          {"G", 1},
                                          {"L", 1},
                                          {"t", 50},
                                          {"n", 100},
                                          {"delta", 0.1}});
        REQUIRE(v >= prev);
        prev = v;
      }
    }
  }

  SECTION("increasing in t") {
    for (const char* name :
         {"argstab_cc_nonsmooth", "argstab_cc_smooth",
          "argstab_cc_nonsmooth_hp", "argstab_cc_smooth_hp"}) {
      double prev = 0.0;
      for (double t : {10.0, 100.0, 1000.0}) {
        const double v = eval_with(name, {{"eta", 0.01},
                                          {"G", 1},
                                          {"L", 1},
                                          {"t", t},
                                          {"n", 100},
                                          {"delta", 0.1}});
        REQUIRE(v >= prev);
        prev = v;
      }
    }
    double prev = 0.0;
    for (double t : {100.0, 1000.0, 10000.0}) {
      const double v = eval_with(
          "wcwc_weak_gen",
          {{"c", 1}, {"G", 1}, {"rho", 0.5}, {"T", t}, {"n", 200}});
      REQUIRE(v >= prev);
      prev = v;
    }
    prev = 0.0;
    for (double t : {100.0, 1000.0, 10000.0}) {
      const double v = eval_with(
          "agda_weak_gen", {{"c", 1}, {"G", 1}, {"L", 1}, {"T", t}, {"n", 200}});
      REQUIRE(v >= prev);
      prev = v;
    }
  }

  SECTION("decreasing in t where the formula decays") {
    double prev = std::numeric_limits<double>::infinity();
    for (double t : {1.0, 10.0, 100.0, 1000.0}) {
      const double v = eval_with(
          "argstab_scsc", {{"G", 1}, {"rho", 1}, {"t", t}, {"n", 100}});
      REQUIRE(v <= prev);
      prev = v;
    }
    prev = std::numeric_limits<double>::infinity();
    for (double t : {10.0, 100.0, 1000.0}) {
      const double v = eval_with(
          "opt_err_scsc", {{"G", 1}, {"rho", 1}, {"T", t}, {"bw", 1}, {"bv", 1}});
      REQUIRE(v <= prev);
      prev = v;
    }
  }

  SECTION("nonincreasing in n") {
    for (const char* name :
         {"argstab_cc_nonsmooth", "argstab_cc_smooth", "argstab_scsc",
          "weak_pd_risk_cc", "weak_pd_risk_cc_smooth", "excess_primal_smooth",
          "wcwc_weak_gen", "agda_weak_gen", "pl_gap"}) {
      double prev = std::numeric_limits<double>::infinity();
      for (double n : {50.0, 200.0, 800.0}) {
        const double v = eval_with(name, {{"eta", 0.001},
                                          {"G", 1},
                                          {"L", 1},
                                          {"rho", 0.5},
                                          {"c", 1},
                                          {"t", 100},
                                          {"T", 100},
                                          {"n", n},
                                          {"bw", 1},
                                          {"bv", 1},
                                          {"beta1", 1},
                                          {"eps", 0.1}});
        REQUIRE(v <= prev);
        prev = v;
      }
    }
  }
}

TEST_CASE("weak_pd_risk_cc decomposes into stability and optimization terms") {
  int checked = 0;
  for (double eta : {0.001, 0.01}) {
    for (double t : {100.0, 1000.0}) {
      for (double g : {0.5, 2.0}) {
        for (double n : {50.0, 500.0}) {
          if (++checked > 10) break;
          const double whole = bounds::eval(q("weak_pd_risk_cc", {{"eta", eta},
                                                                  {"G", g},
                                                                  {"T", t},
                                                                  {"n", n},
                                                                  {"bw", 1},
                                                                  {"bv", 2}}));
          const double stab = bounds::eval(q(
              "argstab_cc_nonsmooth",
              {{"eta", eta}, {"G", g}, {"t", t}, {"n", n}}));
          const double opt = bounds::eval(q(
              "opt_err_cc",
              {{"eta", eta}, {"G", g}, {"T", t}, {"bw", 1}, {"bv", 2}}));
          REQUIRE(whole ==
                  Approx(stab * std::sqrt(2.0) * g + opt).epsilon(1e-12));
        }
      }
    }
  }
}

TEST_CASE("log-space evaluation survives huge exponents") {
  // exp(L^2 t eta^2 / 2) = exp(800) overflows on its own; the assembled
  // value is representable and must come out finite.
  const double v = bounds::eval(q("argstab_cc_smooth", {{"eta", 1.0},
                                                        {"G", 1e-300},
                                                        {"L", 4.0},
                                                        {"t", 100},
                                                        {"n", 1}}));
  REQUIRE(std::isfinite(v));
  const double expected_log = 0.5 * std::log(8.0 * std::exp(1.0) * 101.0) +
                              std::log(1e-300) + 800.0 + 0.5 * std::log(100.0);
  REQUIRE(std::log(v) == Approx(expected_log).epsilon(1e-10));
}

TEST_CASE("sequence form of the diminishing-curvature bound") {
  // constant eta = c/t sequences must match the scalar convenience form
  const long T = 50;
  BoundQuery seq;
  seq.name = "wcwc_diminishing_gen";
  seq.params = {{"G", 1.5}, {"L", 2.0}, {"n", 100}};
  seq.eta_seq.resize(T);
  seq.rho_seq.assign(T, 0.3);
  for (long t = 1; t <= T; ++t)
    seq.eta_seq[static_cast<std::size_t>(t - 1)] = 0.8 / static_cast<double>(t);
  const double from_seq = bounds::eval(seq);
  const double from_scalar = bounds::eval(q("wcwc_diminishing_gen",
                                            {{"G", 1.5},
                                             {"L", 2.0},
                                             {"n", 100},
                                             {"c", 0.8},
                                             {"rho", 0.3},
                                             {"T", 50}}));
  REQUIRE(from_seq == Approx(from_scalar).epsilon(1e-12));
  REQUIRE_THROWS_AS(bounds::eval(q("wcwc_diminishing_gen",
                                   {{"G", 1}, {"L", 1}, {"n", 100}})),
                    config_error);
}

TEST_CASE("every catalogued name evaluates on generic parameters") {
  for (const std::string& name : bounds::names()) {
    BoundQuery query = q(name, {{"eta", 0.01},
                                {"G", 1},
                                {"L", 1},
                                {"rho", 0.5},
                                {"c", 1},
                                {"t", 100},
                                {"T", 100},
                                {"n", 100},
                                {"bw", 1},
                                {"bv", 1},
                                {"t0", 2},
                                {"delta", 0.1},
                                {"beta1", 1},
                                {"beta2", 1},
                                {"eps", 0.1},
                                {"dist", 0.0}});
    const double v = bounds::eval(query);
    REQUIRE(std::isfinite(v));
    REQUIRE(v >= 0.0);
  }
}
