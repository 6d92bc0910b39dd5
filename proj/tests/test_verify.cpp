#include <cmath>
#include <sstream>
#include <stdexcept>

#include "doctest.h"

#include "json.hpp"

#include "blockspin/limits.hpp"
#include "blockspin/verify.hpp"

using namespace blockspin;

TEST_CASE("kolmogorov distance against a continuous limit") {
  DiscreteLaw1D law;
  law.atoms = {{-1.0, 0.5}, {1.0, 0.5}};
  const Gaussian1D standard{0.0, 1.0};
  const double d = ks_distance(law, [&](double x) { return standard.cdf(x); });
  // The largest gap is the jump at -1 against Phi(-1).
  CHECK(d == doctest::Approx(0.3413447460685429).epsilon(1e-12));

  DiscreteLaw1D dirac;
  dirac.atoms = {{0.0, 1.0}};
  CHECK(ks_distance(dirac, [&](double x) { return standard.cdf(x); }) == 0.5);
}

TEST_CASE("kolmogorov distance between discrete laws") {
  DiscreteLaw1D a;
  a.atoms = {{-1.0, 0.5}, {1.0, 0.5}};
  CHECK(ks_distance(a, a) == 0.0);

  DiscreteLaw1D b;
  b.atoms = {{-1.0, 0.4}, {1.0, 0.6}};
  CHECK(ks_distance(a, b) == doctest::Approx(0.1).epsilon(1e-14));

  DiscreteLaw1D shifted;
  shifted.atoms = {{-0.5, 0.5}, {1.5, 0.5}};
  CHECK(ks_distance(a, shifted) == doctest::Approx(0.5).epsilon(1e-14));

  // A law is at distance zero from itself even when built twice.
  const ExactDistribution dist = exact_distribution(ModelParams(0.5, 1.0, 40));
  const DiscreteLaw1D left = pushforward(dist, Statistic::SqrtNM1);
  const DiscreteLaw1D right = pushforward(dist, Statistic::SqrtNM1);
  CHECK(ks_distance(left, right) == 0.0);
}

TEST_CASE("critical pushforward sits at the predicted distance from its limit") {
  const ExactDistribution dist = exact_distribution(ModelParams(0.5, 1.5, 400));
  const DiscreteLaw1D law = pushforward(dist, Statistic::QuarterNM1);
  const double d = ks_distance(law, quartic_cdf);
  CHECK(std::abs(d - 0.0095615) < 1e-5);
}

TEST_CASE("total variation between exact law and samples") {
  const ExactDistribution dist = exact_distribution(ModelParams(1.0, 2.0, 2));
  SampleSet samples{ModelParams(1.0, 2.0, 2), ChainConfig{}, 1, {}, {}};
  samples.records = {{1, 1, 1}, {2, 1, 1}};
  samples.records_per_chain = {2};
  // Every sample on one cell: tv = 1 - p(1,1).
  CHECK(total_variation(dist, samples) ==
        doctest::Approx(1.0 - dist.prob(1, 1)).epsilon(1e-14));
  SampleSet empty{ModelParams(1.0, 2.0, 2), ChainConfig{}, 1, {}, {}};
  CHECK_THROWS_AS(total_variation(dist, empty), std::invalid_argument);
}

TEST_CASE("gaussian verification passes below the critical line") {
  const ComparisonReport report = verify_clt(0.5, 1.0, {100, 200, 400});
  CHECK(report.pass);
  CHECK(report.verdict() == "pass");
  REQUIRE(report.distances.size() == 3);
  CHECK(report.distances[0] > report.distances[1]);
  CHECK(report.distances[1] > report.distances[2]);
  CHECK(report.distances[2] < 0.05);
  CHECK(report.statistic == "sqrtn-m1");
  CHECK(report.thresholds.at("var_target") == doctest::Approx(16.0 / 3.0));
  CHECK(!report.slope.has_value());
  REQUIRE(report.moments.size() == 3);
  CHECK(report.moments[2].at("var_m1") == doctest::Approx(16.0 / 3.0).epsilon(0.05));
  CHECK(report.moments[2].at("corr") == doctest::Approx(0.5).epsilon(0.05));

  CHECK_THROWS_WITH_AS(verify_clt(0.5, 1.5, {100, 200}, {}),
                       "critical line: use verify critical", std::invalid_argument);
  CHECK_THROWS_AS(verify_clt(1.0, 2.0, {100, 200}, {}), std::invalid_argument);
  CHECK_THROWS_AS(verify_clt(1.0, 1.0, {100, 200}, {}), std::invalid_argument);
  CHECK_THROWS_AS(verify_clt(0.5, 1.0, {100, 100}, {}), std::invalid_argument);
  CHECK_THROWS_AS(verify_clt(0.5, 1.0, {}, {}), std::invalid_argument);
}

TEST_CASE("critical verification checks quartic law and gaussian difference") {
  const ComparisonReport report = verify_critical(0.5, 1.5, {400, 1600});
  CHECK(report.pass);
  REQUIRE(report.distances.size() == 2);
  CHECK(report.distances[1] < report.distances[0]);
  CHECK(report.distances[1] < 0.05);
  CHECK(report.moments[1].at("ks_gaussian_diff") < 0.05);
  const double target = report.thresholds.at("second_moment_target");
  CHECK(std::abs(report.moments[1].at("second_moment") - target) < 0.05 * target);
  // The same finite-n law is far from a standard normal.
  CHECK(report.moments[1].at("ks_standard_normal") > 0.04);

  CHECK_THROWS_AS(verify_critical(0.5, 1.0, {100, 200}, {}), std::invalid_argument);
}

TEST_CASE("concentration verification matches slope against the rate infimum") {
  const ComparisonReport report = verify_concentration(1.0, 2.0, {100, 200, 400}, 0.3);
  CHECK(report.pass);
  REQUIRE(report.slope.has_value());
  CHECK(*report.slope < 0.0);
  const double infimum = report.thresholds.at("rate_infimum");
  CHECK(infimum > 0.0);
  CHECK(-*report.slope >= infimum / 2.0);
  CHECK(-*report.slope <= infimum * 2.0);
  CHECK(report.statistic == "concentration");
  CHECK(report.distances.empty());

  CHECK_THROWS_AS(verify_concentration(0.5, 1.0, {100, 200}, 3.0, {}),
                  std::invalid_argument);
  CHECK_THROWS_AS(verify_concentration(0.5, 1.0, {100}, 0.3, {}), std::invalid_argument);
  CHECK_THROWS_AS(verify_concentration(0.5, 1.0, {100, 200}, -0.1, {}),
                  std::invalid_argument);
}

TEST_CASE("sampler verification at a small size") {
  ChainConfig config;
  config.seed = 2023;
  config.sweeps = 120000;
  config.burn_in = 2000;
  const ComparisonReport report = verify_mcmc(0.5, 1.0, 20, config, 2);
  CHECK(report.pass);
  REQUIRE(report.sizes.size() == 1);
  CHECK(report.sizes[0] == 20);
  CHECK(report.distances[0] < 0.02);
  CHECK(report.moments[0].at("ks_sqrtn_m1") < 0.02);
  CHECK(report.moments[0].at("records") == 236000.0);

  // Starved chains stay far from equilibrium statistics.
  ChainConfig tiny;
  tiny.seed = 1;
  tiny.sweeps = 20;
  const ComparisonReport bad = verify_mcmc(0.5, 1.0, 20, tiny, 1);
  CHECK(!bad.pass);
  CHECK(bad.verdict() == "fail");
}

TEST_CASE("report serialization") {
  ComparisonReport report;
  report.alpha = 0.5;
  report.beta = 1.0;
  report.statistic = "sqrtn-m1";
  report.sizes = {100, 200};
  report.distances = {0.04, 0.02};
  report.moments = {{{"var_m1", 5.0}}, {{"var_m1", 5.2}}};
  report.thresholds = {{"final_ks", 0.05}};
  report.pass = true;

  const auto parsed = nlohmann::json::parse(report_json(report));
  CHECK(parsed.at("schema") == "blockspin/report/v1");
  CHECK(parsed.at("params").at("alpha") == 0.5);
  CHECK(parsed.at("sizes").size() == 2);
  CHECK(parsed.at("distances")[1] == 0.02);
  CHECK(parsed.at("moments")[1].at("var_m1") == 5.2);
  CHECK(parsed.at("slope").is_null());
  CHECK(parsed.at("verdict") == "pass");

  report.slope = -0.03;
  CHECK(nlohmann::json::parse(report_json(report)).at("slope") == -0.03);

  std::ostringstream csv;
  write_report_csv(report, csv);
  std::istringstream lines(csv.str());
  std::string header;
  std::getline(lines, header);
  CHECK(header == "n,distance");
  std::string row;
  std::getline(lines, row);
  CHECK(row.substr(0, 4) == "100,");
}
