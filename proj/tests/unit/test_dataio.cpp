#include <catch2/catch.hpp>

#include <cmath>
#include <sstream>

#include "../common/test_util.hpp"
#include "minimax/dataio.hpp"

using namespace minimax;

TEST_CASE("parse_libsvm reads the basic format") {
  std::istringstream in("+1 1:0.5 3:-2\n");
  const Dataset ds = parse_libsvm(in);
  REQUIRE(ds.n() == 1);
  REQUIRE(ds.examples[0].label == 1.0);
  REQUIRE(ds.examples[0].features == Vec{0.5, 0.0, -2.0});
}

TEST_CASE("parse_libsvm maps labels 0 and -1 to -1") {
  std::istringstream in("0 1:1\n-1 1:2\n1 1:3\n");
  const Dataset ds = parse_libsvm(in);
  REQUIRE(ds.examples[0].label == -1.0);
  REQUIRE(ds.examples[1].label == -1.0);
  REQUIRE(ds.examples[2].label == 1.0);
}

TEST_CASE("parse_libsvm skips comments and blank lines") {
  std::istringstream in("# a comment\n\n+1 2:1.5\n   \n-1 1:0.25\n");
  const Dataset ds = parse_libsvm(in);
  REQUIRE(ds.n() == 2);
  REQUIRE(ds.feature_dim() == 2);
  REQUIRE(ds.examples[0].features == Vec{0.0, 1.5});
}

TEST_CASE("parse_libsvm infers the dimension from the whole file") {
  std::istringstream in("+1 1:1\n-1 5:2\n+1 2:3\n");
  const Dataset ds = parse_libsvm(in);
  REQUIRE(ds.feature_dim() == 5);
  REQUIRE(ds.examples[0].features == Vec{1.0, 0.0, 0.0, 0.0, 0.0});
}

TEST_CASE("parse_libsvm rejects malformed input with line numbers") {
  const auto expect_line = [](const char* text, std::size_t line) {
    std::istringstream in(text);
    try {
      parse_libsvm(in);
      FAIL("expected parse_error");
    } catch (const parse_error& e) {
      REQUIRE(e.line() == line);
    }
  };
  expect_line("+1 1:1\n+1 3:1 2:1\n", 2);      // non-monotone indices
  expect_line("+1 1:1 1:2\n", 1);              // repeated index
  expect_line("+1 x:1\n", 1);                  // unparsable index
  expect_line("+1 1:abc\n", 1);                // unparsable value
  expect_line("2 1:1\n", 1);                   // label outside {+1,0,-1}
  expect_line("+1 0:1\n", 1);                  // indices are 1-based
  expect_line("woof 1:1\n", 1);                // unparsable label
}

TEST_CASE("parse_libsvm rejects empty input") {
  std::istringstream in("# only a comment\n\n");
  REQUIRE_THROWS_AS(parse_libsvm(in), parse_error);
}

TEST_CASE("real labels require the explicit flag") {
  std::istringstream strict("3.25 1:1\n");
  REQUIRE_THROWS_AS(parse_libsvm(strict), parse_error);
  std::istringstream relaxed("3.25 1:1\n");
  const Dataset ds = parse_libsvm(relaxed, /*allow_real_labels=*/true);
  REQUIRE(ds.examples[0].label == 3.25);
}

TEST_CASE("serialize then parse is the identity") {
  SECTION("classification data") {
    const Dataset ds = testutil::gaussian_dataset(30, 4, 51);
    std::ostringstream out;
    serialize_libsvm(ds, out);
    std::istringstream in(out.str());
    const Dataset back = parse_libsvm(in);
    REQUIRE(back.n() == ds.n());
    REQUIRE(back.feature_dim() == ds.feature_dim());
    for (std::size_t i = 0; i < ds.n(); ++i) {
      REQUIRE(back.examples[i].label == ds.examples[i].label);
      REQUIRE(back.examples[i].features == ds.examples[i].features);
    }
  }
  SECTION("real labels round-trip with the flag") {
    const Dataset ds = testutil::heavy_dataset(25, 52);
    std::ostringstream out;
    serialize_libsvm(ds, out);
    std::istringstream in(out.str());
    const Dataset back = parse_libsvm(in, true);
    for (std::size_t i = 0; i < ds.n(); ++i) {
      REQUIRE(back.examples[i].label == ds.examples[i].label);
      REQUIRE(back.examples[i].features == ds.examples[i].features);
    }
  }
  SECTION("an all-zero trailing column survives") {
    Dataset ds;
    ds.examples.push_back({{1.0, 0.0}, 1.0});
    ds.examples.push_back({{2.0, 0.0}, -1.0});
    std::ostringstream out;
    serialize_libsvm(ds, out);
    std::istringstream in(out.str());
    const Dataset back = parse_libsvm(in);
    REQUIRE(back.feature_dim() == 2);
    REQUIRE(back.examples[0].features == ds.examples[0].features);
    REQUIRE(back.examples[1].features == ds.examples[1].features);
  }
}

TEST_CASE("gen_synthetic is deterministic per seed") {
  SyntheticSpec spec;
  spec.family = SyntheticFamily::quadratic_saddle_coeffs;
  spec.dim = 3;
  spec.n = 20;
  spec.seed = 7;
  const Dataset a = gen_synthetic(spec);
  const Dataset b = gen_synthetic(spec);
  for (std::size_t i = 0; i < a.n(); ++i)
    REQUIRE(a.examples[i].features == b.examples[i].features);
  spec.seed = 8;
  const Dataset c = gen_synthetic(spec);
  REQUIRE(a.examples[0].features != c.examples[0].features);
}

TEST_CASE("gaussian features have near-zero empirical means") {
  const Dataset ds = testutil::gaussian_dataset(10000, 3, 53);
  for (std::size_t j = 0; j < 3; ++j) {
    double mean = 0.0;
    for (const Example& e : ds.examples) mean += e.features[j];
    mean /= static_cast<double>(ds.n());
    REQUIRE(std::fabs(mean) <= 4.0 / std::sqrt(10000.0));
  }
  // both classes occur
  const double frac = ds.positive_fraction();
  REQUIRE(frac > 0.0);
  REQUIRE(frac < 1.0);
}

TEST_CASE("heavy-tailed labels show finite variance and fat tails") {
  const Dataset ds = testutil::heavy_dataset(10000, 54, 2.5);
  double mean = 0.0;
  for (const Example& e : ds.examples) mean += e.label;
  mean /= static_cast<double>(ds.n());
  double m2 = 0.0, m4 = 0.0;
  for (const Example& e : ds.examples) {
    const double d = e.label - mean;
    m2 += d * d;
    m4 += d * d * d * d;
  }
  m2 /= static_cast<double>(ds.n());
  m4 /= static_cast<double>(ds.n());
  REQUIRE(std::isfinite(m2));
  REQUIRE(m4 / (m2 * m2) > 10.0);  // sample kurtosis far above gaussian 3
}

TEST_CASE("synthetic specs validate their parameters") {
  SyntheticSpec spec;
  spec.family = SyntheticFamily::heavy_tailed_scalar;
  spec.n = 10;
  spec.nu = 1.0;
  REQUIRE_THROWS_AS(gen_synthetic(spec), config_error);
  spec.nu = 2.5;
  spec.n = 0;
  REQUIRE_THROWS_AS(gen_synthetic(spec), config_error);
}

TEST_CASE("normalize_rows scales features to unit norm") {
  Dataset ds = testutil::gaussian_dataset(10, 4, 55);
  ds = normalize_rows(ds);
  for (const Example& e : ds.examples)
    REQUIRE(norm2(e.features) == Approx(1.0).epsilon(1e-12));
}

TEST_CASE("stability trace CSV format") {
  StabilityTrace tr;
  tr.eta_label = 0.1;
  tr.repeats = 2;
  tr.passes = {1.0, 2.0, 3.0};
  tr.iters = {10, 20, 30};
  tr.delta_mean = {0.125, 0.25, 1.0 / 3.0};
  tr.delta_std = {0.0, 0.01, 0.02};

  SECTION("empty trace list writes the bare header") {
    std::ostringstream out;
    write_trace_csv({}, out);
    REQUIRE(out.str() == "pass,eta,mean_delta,std_delta\n");
  }

  SECTION("three rows make a four-line file") {
    std::ostringstream out;
    write_trace_csv({tr}, out);
    const std::string text = out.str();
    REQUIRE(std::count(text.begin(), text.end(), '\n') == 4);
    REQUIRE(text.rfind("pass,eta,mean_delta,std_delta\n", 0) == 0);
  }

  SECTION("values round-trip through parsing bitwise") {
    std::ostringstream out;
    write_trace_csv({tr}, out);
    std::istringstream in(out.str());
    std::string line;
    std::getline(in, line);  // header
    std::size_t row = 0;
    while (std::getline(in, line)) {
      double pass = 0.0, eta = 0.0, mean = 0.0, sd = 0.0;
      REQUIRE(std::sscanf(line.c_str(), "%lf,%lf,%lf,%lf", &pass, &eta, &mean,
                          &sd) == 4);
      REQUIRE(pass == tr.passes[row]);
      REQUIRE(eta == tr.eta_label);
      REQUIRE(mean == tr.delta_mean[row]);
      REQUIRE(sd == tr.delta_std[row]);
      ++row;
    }
    REQUIRE(row == 3);
  }

  SECTION("config echo lines are '#' comments before the header") {
    std::ostringstream out;
    write_trace_csv({tr}, out, {"seed=1", "T=30"});
    REQUIRE(out.str().rfind("# seed=1\n# T=30\npass,eta", 0) == 0);
  }
}

TEST_CASE("metric CSV format") {
  std::ostringstream out;
  write_metrics_csv({{"weak_pd_emp", 0.5, 0.01, "empirical"}}, out);
  REQUIRE(out.str() ==
          "metric,value,stderr,method\nweak_pd_emp,0.5,0.01,empirical\n");
}

TEST_CASE("format_real survives a double round trip") {
  RngStream rng(56);
  for (int i = 0; i < 200; ++i) {
    const double x = (rng.next_unit() - 0.5) * std::pow(10.0, rng.next_index(8));
    REQUIRE(std::stod(format_real(x)) == x);
  }
}
