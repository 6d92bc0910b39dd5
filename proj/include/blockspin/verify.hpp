// Comparison of exact finite-n laws (and sampler output) against the
// limiting objects, with machine-readable reports.
#pragma once

#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "blockspin/exact.hpp"
#include "blockspin/mcmc.hpp"

namespace blockspin {

// Thresholds shared by the verification drivers.  The defaults are the
// values the acceptance checks pin.
struct VerifyOptions {
  double final_ks = 0.05;             // Kolmogorov distance at the largest size
  int max_inversions = 1;             // tolerated increases along the distance series
  double inversion_rel_tol = 0.10;    // an increase must stay below this fraction
  double slope_band_factor = 2.0;     // decay slope vs rate infimum agreement band
  double tv_threshold = 0.02;         // sampler total variation bound
  double second_moment_rel_tol = 0.05;
  int threads = 0;
  int max_n = 20000;
};

struct ComparisonReport {
  double alpha = 0.0;
  double beta = 0.0;
  std::string statistic;
  std::vector<int> sizes;
  std::vector<double> distances;                        // one entry per size
  std::vector<std::map<std::string, double>> moments;   // named values per size
  std::optional<double> slope;                          // decay fits only
  std::map<std::string, double> thresholds;
  bool pass = false;

  std::string verdict() const { return pass ? "pass" : "fail"; }
};

std::string report_json(const ComparisonReport& report, int indent = 2);

// CSV with header n,distance.
void write_report_csv(const ComparisonReport& report, std::ostream& out);

// Kolmogorov distance between a finitely supported law and a continuous
// limit CDF: at every atom both the left and the right limit of the step
// CDF are compared.
double ks_distance(const DiscreteLaw1D& law, const std::function<double(double)>& limit_cdf);

// Kolmogorov distance between two finitely supported laws, i.e. the largest
// gap between their step CDFs over the union of atom locations.
double ks_distance(const DiscreteLaw1D& a, const DiscreteLaw1D& b);

// Total variation between the exact law of (k1, k2) and the empirical
// counts of a sample set at the same n.
double total_variation(const ExactDistribution& exact, const SampleSet& samples);

// Gaussian fluctuations below the critical line: Kolmogorov distances of
// sqrt(n) m1 against its limit over the given sizes, plus covariance and
// rotated-coordinate checks at each size.
ComparisonReport verify_clt(double alpha, double beta, const std::vector<int>& sizes,
                            const VerifyOptions& options = {});

// Critical-line fluctuations: n^{1/4} m1 against the quartic law, the
// rotated difference against its Gaussian, and the quartic second moment.
ComparisonReport verify_critical(double alpha, double beta, const std::vector<int>& sizes,
                                 const VerifyOptions& options = {});

// Exponential concentration: least-squares decay slope of
// log P(outside epsilon-balls around the limit atoms) against n, compared
// with the rate-function infimum over the same region.
ComparisonReport verify_concentration(double alpha, double beta,
                                      const std::vector<int>& sizes, double epsilon,
                                      const VerifyOptions& options = {});

// Sampler against the exact law at one size: total variation of the block
// counts plus a Kolmogorov distance of sqrt(n) m1.
ComparisonReport verify_mcmc(double alpha, double beta, int n, const ChainConfig& config,
                             int chains, const VerifyOptions& options = {});

}  // namespace blockspin
