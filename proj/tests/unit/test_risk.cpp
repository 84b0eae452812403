#include <catch2/catch.hpp>

#include <cmath>

#include "../common/test_util.hpp"
#include "minimax/bounds.hpp"
#include "minimax/optimizers.hpp"
#include "minimax/risk.hpp"

using namespace minimax;

namespace {

MinimaxProblem quad_problem(std::size_t n = 60, std::size_t dim = 3,
                            std::uint64_t seed = 1) {
  return make_quadratic_scsc(1.0, dim, testutil::quad_dataset(n, dim, seed));
}

}  // namespace

TEST_CASE("weak PD gap vanishes at the empirical saddle") {
  const MinimaxProblem p = quad_problem();
  const Point saddle = empirical_saddle(p).pt;
  REQUIRE(empirical_weak_pd_gap(p, saddle).value ==
          Approx(0.0).margin(1e-8));
}

TEST_CASE("weak PD gap is nonnegative at random points") {
  const MinimaxProblem p = quad_problem(40, 2, 2);
  RngStream rng(5);
  for (int i = 0; i < 50; ++i) {
    const Point pt = sample_feasible_point(p, rng);
    REQUIRE(empirical_weak_pd_gap(p, pt).value >= -1e-9);
  }
}

TEST_CASE("inner solver agrees with the closed forms") {
  InnerSolverConfig inner;
  inner.tol = 1e-10;

  SECTION("quadratic") {
    const MinimaxProblem p = quad_problem(30, 2, 3);
    RngStream rng(7);
    for (int i = 0; i < 10; ++i) {
      const Point pt = sample_feasible_point(p, rng);
      const double closed = empirical_weak_pd_gap(p, pt).value;
      const double iterative =
          empirical_weak_pd_gap(p, pt, inner, /*force_iterative=*/true).value;
      REQUIRE(iterative == Approx(closed).margin(1e-6));
    }
  }
  SECTION("bilinear") {
    const MinimaxProblem p =
        make_bilinear_cc(testutil::bilinear_dataset(30, 3, 4), {1.0, 1.0});
    RngStream rng(8);
    for (int i = 0; i < 10; ++i) {
      const Point pt = sample_feasible_point(p, rng);
      const double closed = empirical_weak_pd_gap(p, pt).value;
      const double iterative =
          empirical_weak_pd_gap(p, pt, inner, true).value;
      REQUIRE(iterative == Approx(closed).margin(1e-6));
    }
  }
}

TEST_CASE("solam dual supremum is the closed-form argmax") {
  const MinimaxProblem p =
      make_auc_minimax(testutil::gaussian_dataset(50, 4, 5));
  RngStream rng(9);
  const Point pt = sample_feasible_point(p, rng);

  const GapResult closed = empirical_primal_risk(p, pt.w);
  InnerSolverConfig inner;
  inner.tol = 1e-10;
  const InnerResult iterative = maximize_over_dual(p, pt.w, inner);
  REQUIRE(closed.value == Approx(iterative.value).margin(1e-7));

  // stationarity of the concave quadratic at the interior argmax
  double m = 0.0;
  const std::size_t d = p.primal_dim - 2;
  for (const Example& z : p.data.examples) {
    double h = 0.0;
    for (std::size_t i = 0; i < d; ++i) h += pt.w[i] * z.features[i];
    m += z.label > 0.0 ? -h / p.solam_p : h / (1.0 - p.solam_p);
  }
  m /= static_cast<double>(p.n());
  if (std::fabs(m) < p.ball_v) {
    const GradPair g = empirical_grad(p, Point{pt.w, Vec{m}});
    REQUIRE(std::fabs(g.gv[0]) <= 1e-12);
  }
}

TEST_CASE("primal risk dominates the objective at any dual point") {
  const MinimaxProblem p = quad_problem(30, 2, 6);
  RngStream rng(10);
  const Point pt = sample_feasible_point(p, rng);
  const double r_s = empirical_primal_risk(p, pt.w).value;
  for (int i = 0; i < 100; ++i) {
    const Point probe = sample_feasible_point(p, rng);
    REQUIRE(r_s >= empirical_value(p, Point{pt.w, probe.v}) - 1e-9);
  }
}

TEST_CASE("quadratic population risk with zero moments is the pure quadratic") {
  const MinimaxProblem p = quad_problem(20, 3, 7);
  const auto pop = PopulationModel::quadratic_moments(0.0, zeros(3), zeros(3));
  RngStream rng(11);
  for (int i = 0; i < 20; ++i) {
    const Point pt = sample_feasible_point(p, rng);
    const double expected = 0.5 * (dot(pt.w, pt.w) - dot(pt.v, pt.v));
    REQUIRE(population_risk(p, pop, pt).value == Approx(expected).margin(1e-12));
  }
}

TEST_CASE("population primal risk vanishes at the origin under zero moments") {
  const MinimaxProblem p = quad_problem(20, 3, 71);
  const auto pop = PopulationModel::quadratic_moments(0.0, zeros(3), zeros(3));
  const MinimaxProblem surrogate = population_surrogate(p, pop);
  REQUIRE(empirical_primal_risk(surrogate, zeros(3)).value ==
          Approx(0.0).margin(1e-15));
}

TEST_CASE("plain generalization gap shrinks as the sample grows") {
  const auto mean_abs_gap = [](std::size_t n) {
    const auto pop = PopulationModel::quadratic_moments(0.0, zeros(2), zeros(2));
    std::vector<double> gaps;
    for (int r = 0; r < 30; ++r) {
      const MinimaxProblem p = make_quadratic_scsc(
          1.0, 2,
          testutil::quad_dataset(n, 2, derive_seed(81, static_cast<std::uint64_t>(r))));
      const Point u = empirical_saddle(p).pt;
      gaps.push_back(std::fabs(population_risk(p, pop, u).value -
                               empirical_value(p, u)));
    }
    return testutil::mean_of(gaps);
  };
  REQUIRE(mean_abs_gap(200) < mean_abs_gap(50));
}

TEST_CASE("monte-carlo population risk is consistent with analytic moments") {
  const MinimaxProblem p = quad_problem(50, 2, 8);
  const auto analytic = PopulationModel::quadratic_moments(0.0, zeros(2), zeros(2));
  const auto mc =
      PopulationModel::from_test_set(testutil::quad_dataset(100000, 2, 999));
  RngStream rng(12);
  const Point pt = sample_feasible_point(p, rng);
  const ValueWithError a = population_risk(p, analytic, pt);
  const ValueWithError m = population_risk(p, mc, pt);
  REQUIRE(m.stderr_ > 0.0);
  REQUIRE(std::fabs(m.value - a.value) <= 4.0 * m.stderr_);
}

TEST_CASE("monte-carlo standard error halves when samples quadruple") {
  const MinimaxProblem p = quad_problem(50, 2, 9);
  RngStream rng(13);
  const Point pt = sample_feasible_point(p, rng);
  const auto small =
      PopulationModel::from_test_set(testutil::quad_dataset(20000, 2, 100));
  const auto big =
      PopulationModel::from_test_set(testutil::quad_dataset(80000, 2, 101));
  const double se_small = population_risk(p, small, pt).stderr_;
  const double se_big = population_risk(p, big, pt).stderr_;
  const double ratio = se_big / se_small;
  REQUIRE(ratio >= 0.4);
  REQUIRE(ratio <= 0.6);
}

TEST_CASE("analytic population mode needs known moments") {
  const MinimaxProblem p =
      make_auc_minimax(testutil::gaussian_dataset(30, 3, 10));
  const auto pop = PopulationModel::quadratic_moments(0.0, zeros(3), zeros(3));
  const Point pt{zeros(p.primal_dim), zeros(p.dual_dim)};
  REQUIRE_THROWS_AS(population_risk(p, pop, pt), unsupported_operation);
}

TEST_CASE("gap_plain is zero when the test set is the training set") {
  const MinimaxProblem p =
      make_auc_minimax(testutil::gaussian_dataset(40, 3, 11));
  const auto pop = PopulationModel::from_test_set(p.data);
  RngStream rng(14);
  const Point pt = sample_feasible_point(p, rng);
  const RiskReport rep = generalization_gap(p, pop, pt);
  REQUIRE(rep.gap_plain == Approx(0.0).margin(1e-12));
}

TEST_CASE("weak PD decomposition is an arithmetic identity") {
  const MinimaxProblem p = quad_problem(40, 2, 12);
  const auto pop = PopulationModel::quadratic_moments(0.0, zeros(2), zeros(2));
  RngStream rng(15);
  const Point pt = sample_feasible_point(p, rng);
  const RiskReport rep = generalization_gap(p, pop, pt);
  REQUIRE(rep.weak_pd_pop - rep.weak_pd_emp ==
          Approx(rep.weak_pd_gen).margin(1e-12));
}

TEST_CASE("strong PD empirical risk equals the weak gap at a realized point") {
  const MinimaxProblem p = quad_problem(30, 2, 13);
  RngStream rng(16);
  InnerSolverConfig inner;
  inner.tol = 1e-10;
  for (int i = 0; i < 5; ++i) {
    const Point pt = sample_feasible_point(p, rng);
    const double weak = empirical_weak_pd_gap(p, pt, inner).value;
    const double strong = strong_pd_empirical_risk(p, pt, inner).value;
    REQUIRE(strong == Approx(weak).margin(1e-6));
  }
}

TEST_CASE("inner solver nonconvergence flags instead of throwing") {
  const MinimaxProblem p =
      make_auc_minimax(testutil::gaussian_dataset(30, 3, 17));
  InnerSolverConfig starved;
  starved.max_iters = 1;
  starved.tol = 1e-14;
  RngStream rng(18);
  const Point pt = sample_feasible_point(p, rng);
  const GapResult g = empirical_weak_pd_gap(p, pt, starved);
  REQUIRE_FALSE(g.reliable);
}

TEST_CASE("averaged sgda respects the scsc optimization-error formula") {
  const MinimaxProblem p = quad_problem(50, 2, 19);
  const long iters = 1000;
  std::vector<double> gaps;
  for (int r = 0; r < 25; ++r) {
    RunConfig rc;
    rc.sched = Schedule::inv_rho_t(1.0);
    rc.iters = iters;
    rc.seed = derive_seed(20, static_cast<std::uint64_t>(r));
    gaps.push_back(empirical_weak_pd_gap(p, run(p, rc).averaged).value);
  }
  const double bound =
      bounds::opt_err_scsc(p.lipschitz_g, 1.0, static_cast<double>(iters),
                           p.ball_w, p.ball_v);
  REQUIRE(testutil::mean_of(gaps) + 2.0 * testutil::stderr_of(gaps) <= bound);
}

TEST_CASE("averaged sgda respects the convex-concave optimization formula") {
  const MinimaxProblem p =
      make_bilinear_cc(testutil::bilinear_dataset(50, 3, 21), {1.0, 1.0});
  const long iters = 500;
  const double eta = 1.0 / std::sqrt(static_cast<double>(iters));
  std::vector<double> gaps;
  for (int r = 0; r < 25; ++r) {
    RunConfig rc;
    rc.sched = Schedule::constant(eta);
    rc.iters = iters;
    rc.seed = derive_seed(22, static_cast<std::uint64_t>(r));
    rc.init = Point{{0.2, 0.0, 0.0}, {0.0, -0.2, 0.0}};  // off the saddle
    gaps.push_back(empirical_weak_pd_gap(p, run(p, rc).averaged).value);
  }
  REQUIRE(testutil::mean_of(gaps) > 0.0);
  const double bound = bounds::opt_err_cc(eta, p.lipschitz_g,
                                          static_cast<double>(iters),
                                          p.ball_w, p.ball_v);
  REQUIRE(testutil::mean_of(gaps) + 2.0 * testutil::stderr_of(gaps) <= bound);
}

TEST_CASE("gradient-dominance gap check") {
  const std::size_t dim = 2, n = 50;
  const auto pop = PopulationModel::quadratic_moments(0.0, zeros(dim), zeros(dim));
  const auto factory = [&](std::uint64_t seed) {
    return make_quadratic_scsc(1.0, dim, testutil::quad_dataset(n, dim, seed));
  };

  SECTION("exact saddles have zero distance term and obey the bound") {
    const PlGapResult r = verify_pl_gap(factory, pop, 60, 23);
    REQUIRE(r.distance_term == 0.0);
    REQUIRE(r.beta1 == Approx(1.0));
    REQUIRE(r.beta2 == Approx(1.0));
    REQUIRE(r.lhs <= r.rhs + 2.0 * r.lhs_stderr);
  }

  SECTION("a crude algorithm output contributes its distance") {
    const auto off_saddle = [](const MinimaxProblem& prob) {
      Point pt = empirical_saddle(prob).pt;
      pt.w[0] += 0.25;
      return pt;
    };
    const PlGapResult r = verify_pl_gap(factory, pop, 20, 24, off_saddle);
    REQUIRE(r.distance_term == Approx(2.0 * r.g_used * 0.25).epsilon(1e-9));
  }

  SECTION("non-PL kinds are rejected") {
    const auto bad = [&](std::uint64_t seed) {
      return make_bilinear_cc(testutil::bilinear_dataset(20, 2, seed));
    };
    REQUIRE_THROWS_AS(verify_pl_gap(bad, pop, 5, 25), unsupported_operation);
  }
}
