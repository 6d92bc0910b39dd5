#include "blockspin/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "blockspin/limits.hpp"
#include "blockspin/numeric.hpp"

#include "json.hpp"

namespace blockspin {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_sizes(const std::vector<int>& sizes) {
  if (sizes.empty()) throw std::invalid_argument("at least one size is required");
  int previous = 0;
  for (int n : sizes) {
    if (n < 2 || n % 2 != 0) throw std::invalid_argument("sizes must be even and >= 2");
    if (n <= previous) throw std::invalid_argument("sizes must be strictly increasing");
    previous = n;
  }
}

// True when the series decreases apart from at most max_inversions upward
// steps, each below rel_tol of the preceding value.
bool nearly_decreasing(const std::vector<double>& series, int max_inversions,
                       double rel_tol) {
  int inversions = 0;
  for (std::size_t i = 1; i < series.size(); ++i) {
    if (series[i] > series[i - 1]) {
      ++inversions;
      if (inversions > max_inversions) return false;
      if (series[i] - series[i - 1] > rel_tol * series[i - 1]) return false;
    }
  }
  return true;
}

void check_gaussian_entry(double alpha, double beta) {
  validate_couplings(alpha, beta);
  if (!(alpha < beta)) throw std::invalid_argument("verification requires alpha < beta");
  const double sum = alpha + beta;
  if (sum == 2.0) throw std::invalid_argument("critical line: use verify critical");
  if (sum > 2.0) throw std::invalid_argument("supercritical couplings: no gaussian limit");
}

}  // namespace

double ks_distance(const DiscreteLaw1D& law,
                   const std::function<double(double)>& limit_cdf) {
  CompensatedSum cumulative;
  double worst = 0.0;
  for (const DiscreteLaw1D::Atom& atom : law.atoms) {
    const double below = cumulative.value();
    cumulative.add(atom.probability);
    const double at = cumulative.value();
    const double limit = limit_cdf(atom.location);
    worst = std::max({worst, std::abs(at - limit), std::abs(below - limit)});
  }
  return std::min(worst, 1.0);
}

double ks_distance(const DiscreteLaw1D& a, const DiscreteLaw1D& b) {
  CompensatedSum cum_a;
  CompensatedSum cum_b;
  double worst = 0.0;
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < a.atoms.size() || j < b.atoms.size()) {
    const double xa = i < a.atoms.size() ? a.atoms[i].location : kInf;
    const double xb = j < b.atoms.size() ? b.atoms[j].location : kInf;
    const double x = std::min(xa, xb);
    while (i < a.atoms.size() && a.atoms[i].location == x) cum_a.add(a.atoms[i++].probability);
    while (j < b.atoms.size() && b.atoms[j].location == x) cum_b.add(b.atoms[j++].probability);
    worst = std::max(worst, std::abs(cum_a.value() - cum_b.value()));
  }
  return std::min(worst, 1.0);
}

double total_variation(const ExactDistribution& exact, const SampleSet& samples) {
  if (samples.params.n != exact.params.n) {
    throw std::invalid_argument("samples and exact law use different n");
  }
  if (samples.records.empty()) throw std::invalid_argument("sample set is empty");
  const int side = exact.side();
  std::vector<long long> counts(static_cast<std::size_t>(side) * side, 0);
  for (const SampleRecord& r : samples.records) {
    ++counts[static_cast<std::size_t>(r.k1) * side + r.k2];
  }
  const double total = static_cast<double>(samples.records.size());
  CompensatedSum sum;
  for (int k1 = 0; k1 < side; ++k1) {
    for (int k2 = 0; k2 < side; ++k2) {
      const double empirical = counts[static_cast<std::size_t>(k1) * side + k2] / total;
      sum.add(std::abs(empirical - exact.prob(k1, k2)));
    }
  }
  return 0.5 * sum.value();
}

std::string report_json(const ComparisonReport& report, int indent) {
  nlohmann::json j{
      {"schema", "blockspin/report/v1"},
      {"params", {{"alpha", report.alpha}, {"beta", report.beta}}},
      {"statistic", report.statistic},
      {"sizes", report.sizes},
      {"distances", report.distances},
      {"moments", nlohmann::json::array()},
      {"thresholds", report.thresholds},
      {"verdict", report.verdict()},
  };
  for (const auto& entry : report.moments) j["moments"].push_back(entry);
  if (report.slope.has_value()) {
    j["slope"] = *report.slope;
  } else {
    j["slope"] = nullptr;
  }
  return j.dump(indent);
}

void write_report_csv(const ComparisonReport& report, std::ostream& out) {
  out << "n,distance\n";
  char line[64];
  for (std::size_t i = 0; i < report.sizes.size(); ++i) {
    std::snprintf(line, sizeof line, "%d,%.17g\n", report.sizes[i], report.distances[i]);
    out << line;
  }
}

ComparisonReport verify_clt(double alpha, double beta, const std::vector<int>& sizes,
                            const VerifyOptions& options) {
  check_gaussian_entry(alpha, beta);
  require_sizes(sizes);
  const Gaussian2D limit = clt_covariance(alpha, beta);
  const Gaussian2D rotated = w_covariance(alpha, beta);
  const Gaussian1D m1_limit{0.0, limit.cov[0][0]};
  const Gaussian1D w2_limit{0.0, rotated.cov[1][1]};

  ComparisonReport report;
  report.alpha = alpha;
  report.beta = beta;
  report.statistic = statistic_name(Statistic::SqrtNM1);
  report.sizes = sizes;
  double last_w2 = kInf;
  for (int n : sizes) {
    const ExactDistribution dist =
        exact_distribution(ModelParams(alpha, beta, n), {options.max_n, options.threads});
    const DiscreteLaw1D m1_law = pushforward(dist, Statistic::SqrtNM1);
    const DiscreteLaw1D w2_law = pushforward(dist, Statistic::W2Tilde);
    const double d = ks_distance(m1_law, [&](double x) { return m1_limit.cdf(x); });
    last_w2 = ks_distance(w2_law, [&](double x) { return w2_limit.cdf(x); });
    const MomentSummary mom = moments(dist);
    report.distances.push_back(d);
    report.moments.push_back({
        {"var_m1", mom.cov[0][0]},
        {"var_m2", mom.cov[1][1]},
        {"cov", mom.cov[0][1]},
        {"corr", mom.cov[0][1] / std::sqrt(mom.cov[0][0] * mom.cov[1][1])},
        {"ks_w2_tilde", last_w2},
        {"var_w2_tilde", w2_law.variance()},
    });
  }
  report.thresholds = {
      {"final_ks", options.final_ks},
      {"max_inversions", static_cast<double>(options.max_inversions)},
      {"inversion_rel_tol", options.inversion_rel_tol},
      {"var_target", limit.cov[0][0]},
      {"corr_target", limit.cov[0][1] / limit.cov[0][0]},
      {"w2_var_target", rotated.cov[1][1]},
  };
  report.pass = nearly_decreasing(report.distances, options.max_inversions,
                                  options.inversion_rel_tol) &&
                report.distances.back() < options.final_ks && last_w2 < options.final_ks;
  return report;
}

ComparisonReport verify_critical(double alpha, double beta, const std::vector<int>& sizes,
                                 const VerifyOptions& options) {
  const auto [quartic, diff_limit] = critical_laws(alpha, beta);
  require_sizes(sizes);
  const double m2_target = quartic_second_moment();

  ComparisonReport report;
  report.alpha = alpha;
  report.beta = beta;
  report.statistic = statistic_name(Statistic::QuarterNM1);
  report.sizes = sizes;
  double last_diff = kInf;
  double last_m2 = kInf;
  for (int n : sizes) {
    const ExactDistribution dist =
        exact_distribution(ModelParams(alpha, beta, n), {options.max_n, options.threads});
    const DiscreteLaw1D quartic_law = pushforward(dist, Statistic::QuarterNM1);
    const DiscreteLaw1D diff_law = pushforward(dist, Statistic::HalfSqrtNDiff);
    const double d = ks_distance(quartic_law, quartic_cdf);
    last_diff = ks_distance(diff_law, [&](double x) { return diff_limit.cdf(x); });
    last_m2 = quartic_law.second_moment();
    const Gaussian1D standard{0.0, 1.0};
    report.distances.push_back(d);
    report.moments.push_back({
        {"ks_gaussian_diff", last_diff},
        {"second_moment", last_m2},
        {"ks_standard_normal", ks_distance(quartic_law, [&](double x) { return standard.cdf(x); })},
    });
  }
  report.thresholds = {
      {"final_ks", options.final_ks},
      {"max_inversions", static_cast<double>(options.max_inversions)},
      {"inversion_rel_tol", options.inversion_rel_tol},
      {"second_moment_target", m2_target},
      {"second_moment_rel_tol", options.second_moment_rel_tol},
      {"diff_var_target", diff_limit.variance},
  };
  report.pass = nearly_decreasing(report.distances, options.max_inversions,
                                  options.inversion_rel_tol) &&
                report.distances.back() < options.final_ks &&
                last_diff < options.final_ks &&
                std::abs(last_m2 - m2_target) < options.second_moment_rel_tol * m2_target;
  return report;
}

ComparisonReport verify_concentration(double alpha, double beta,
                                      const std::vector<int>& sizes, double epsilon,
                                      const VerifyOptions& options) {
  validate_couplings(alpha, beta);
  require_sizes(sizes);
  if (sizes.size() < 2) {
    throw std::invalid_argument("a decay slope needs at least two sizes");
  }
  const DiracMixture mixture = limit_mixture(alpha, beta);
  std::vector<Point2> centers;
  for (const WeightedAtom& atom : mixture.atoms) centers.push_back({atom.m1, atom.m2});

  ComparisonReport report;
  report.alpha = alpha;
  report.beta = beta;
  report.statistic = "concentration";
  report.sizes = sizes;
  std::vector<double> log_probs;
  for (int n : sizes) {
    const ExactDistribution dist =
        exact_distribution(ModelParams(alpha, beta, n), {options.max_n, options.threads});
    const double lp = log_prob_region(dist, centers, epsilon);
    if (lp == -kInf) {
      throw std::invalid_argument("epsilon-balls cover the whole grid; nothing to measure");
    }
    log_probs.push_back(lp);
    report.moments.push_back({{"log_prob", lp}});
  }

  // Least-squares slope of log_prob against n.
  const double count = static_cast<double>(sizes.size());
  double mean_n = 0.0;
  double mean_lp = 0.0;
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    mean_n += sizes[i];
    mean_lp += log_probs[i];
  }
  mean_n /= count;
  mean_lp /= count;
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    const double dx = sizes[i] - mean_n;
    sxx += dx * dx;
    sxy += dx * (log_probs[i] - mean_lp);
  }
  const double slope = sxy / sxx;
  report.slope = slope;

  // Infimum of the rate function over the measured region, from a dense
  // grid over the square.
  const TiltedRate rate(alpha, beta);
  constexpr int kGrid = 2001;
  const double eps2 = epsilon * epsilon;
  double inf_rate = kInf;
  for (int i = 0; i < kGrid; ++i) {
    const double x = -1.0 + 2.0 * i / (kGrid - 1);
    for (int j = 0; j < kGrid; ++j) {
      const double y = -1.0 + 2.0 * j / (kGrid - 1);
      bool outside = true;
      for (const Point2& c : centers) {
        const double d1 = x - c.m1;
        const double d2 = y - c.m2;
        if (d1 * d1 + d2 * d2 < eps2) {
          outside = false;
          break;
        }
      }
      if (outside) inf_rate = std::min(inf_rate, rate(x, y));
    }
  }

  report.thresholds = {
      {"slope_band_factor", options.slope_band_factor},
      {"rate_infimum", inf_rate},
      {"epsilon", epsilon},
  };
  const double decay = -slope;
  report.pass = slope < 0.0 && decay >= inf_rate / options.slope_band_factor &&
                decay <= inf_rate * options.slope_band_factor;
  return report;
}

ComparisonReport verify_mcmc(double alpha, double beta, int n, const ChainConfig& config,
                             int chains, const VerifyOptions& options) {
  const ModelParams params(alpha, beta, n);
  const ExactDistribution exact =
      exact_distribution(params, {options.max_n, options.threads});
  const SampleSet samples = run_chains(params, config, chains, options.threads);
  const double tv = total_variation(exact, samples);
  const double ks = ks_distance(empirical_law(samples, Statistic::SqrtNM1),
                                pushforward(exact, Statistic::SqrtNM1));

  ComparisonReport report;
  report.alpha = alpha;
  report.beta = beta;
  report.statistic = "mcmc";
  report.sizes = {n};
  report.distances = {tv};
  report.moments.push_back({
      {"ks_sqrtn_m1", ks},
      {"records", static_cast<double>(samples.records.size())},
  });
  report.thresholds = {{"tv", options.tv_threshold}};
  report.pass = tv < options.tv_threshold;
  return report;
}

}  // namespace blockspin
