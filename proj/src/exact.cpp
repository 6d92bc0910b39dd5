#include "blockspin/exact.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "blockspin/numeric.hpp"
#include "blockspin/parallel.hpp"

namespace blockspin {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Log of the sum of exp(log_weight) over the grid, computed with the usual
// max shift.  Row maxima and row partial sums are produced in parallel and
// combined serially in row order, so the value does not depend on the
// thread count.
double log_sum_exp_grid(const std::vector<double>& log_weight, int side, int threads) {
  std::vector<double> row_max(side, kNegInf);
  parallel_chunks(0, side, threads, [&](int lo, int hi) {
    for (int k1 = lo; k1 < hi; ++k1) {
      double mx = kNegInf;
      for (int k2 = 0; k2 < side; ++k2) {
        mx = std::max(mx, log_weight[static_cast<std::size_t>(k1) * side + k2]);
      }
      row_max[k1] = mx;
    }
  });
  const double shift = *std::max_element(row_max.begin(), row_max.end());

  std::vector<double> row_sum(side, 0.0);
  parallel_chunks(0, side, threads, [&](int lo, int hi) {
    for (int k1 = lo; k1 < hi; ++k1) {
      CompensatedSum sum;
      for (int k2 = 0; k2 < side; ++k2) {
        sum.add(std::exp(log_weight[static_cast<std::size_t>(k1) * side + k2] - shift));
      }
      row_sum[k1] = sum.value();
    }
  });
  CompensatedSum total;
  for (double s : row_sum) total.add(s);
  return shift + std::log(total.value());
}

}  // namespace

double ExactDistribution::prob(int k1, int k2) const {
  return std::exp(log_weight_at(k1, k2) - log_z);
}

ExactDistribution exact_distribution(const ModelParams& params, const ExactOptions& options) {
  if (params.n > options.max_n) {
    throw std::invalid_argument("n exceeds the exact-grid cap (max_n)");
  }
  const int half = params.block_size();
  const int side = half + 1;
  ExactDistribution dist{params,
                         std::vector<double>(static_cast<std::size_t>(side) * side), 0.0};

  const LogFactorialTable table(half);
  std::vector<double> log_multiplicity(side);
  std::vector<double> m(side);
  for (int k = 0; k < side; ++k) {
    log_multiplicity[k] = table.log_choose(half, k);
    m[k] = magnetization_of_count(k, params.n);
  }

  parallel_chunks(0, side, options.threads, [&](int lo, int hi) {
    for (int k1 = lo; k1 < hi; ++k1) {
      double* row = dist.log_weight.data() + static_cast<std::size_t>(k1) * side;
      for (int k2 = 0; k2 < side; ++k2) {
        row[k2] = log_multiplicity[k1] + log_multiplicity[k2] -
                  hamiltonian_m(params, m[k1], m[k2]);
      }
    }
  });

  dist.log_z = log_sum_exp_grid(dist.log_weight, side, options.threads);
  return dist;
}

ExactDistribution brute_force_distribution(const ModelParams& params) {
  if (params.n > 20) {
    throw std::invalid_argument("brute force enumeration is limited to n <= 20");
  }
  const int half = params.block_size();
  const int side = half + 1;
  std::vector<CompensatedSum> weight(static_cast<std::size_t>(side) * side);

  SpinConfiguration config;
  config.spins.resize(params.n);
  const std::uint32_t total = 1u << params.n;
  for (std::uint32_t mask = 0; mask < total; ++mask) {
    int k1 = 0;
    int k2 = 0;
    for (int i = 0; i < params.n; ++i) {
      const bool up = (mask >> i) & 1u;
      config.spins[i] = up ? Spin{1} : Spin{-1};
      if (up) ++(i < half ? k1 : k2);
    }
    const double h = hamiltonian_spin(params, config);
    weight[static_cast<std::size_t>(k1) * side + k2].add(std::exp(-h));
  }

  ExactDistribution dist{params,
                         std::vector<double>(static_cast<std::size_t>(side) * side), 0.0};
  for (std::size_t i = 0; i < weight.size(); ++i) {
    dist.log_weight[i] = std::log(weight[i].value());
  }
  dist.log_z = log_sum_exp_grid(dist.log_weight, side, 1);
  return dist;
}

double total_variation(const ExactDistribution& a, const ExactDistribution& b) {
  if (a.params.n != b.params.n) {
    throw std::invalid_argument("total variation needs laws on the same grid");
  }
  CompensatedSum sum;
  const int side = a.side();
  for (int k1 = 0; k1 < side; ++k1) {
    for (int k2 = 0; k2 < side; ++k2) {
      sum.add(std::abs(a.prob(k1, k2) - b.prob(k1, k2)));
    }
  }
  return 0.5 * sum.value();
}

const char* statistic_name(Statistic statistic) {
  switch (statistic) {
    case Statistic::SqrtNM1: return "sqrtn-m1";
    case Statistic::SqrtNM2: return "sqrtn-m2";
    case Statistic::QuarterNM1: return "quartern-m1";
    case Statistic::HalfSqrtNDiff: return "half-sqrtn-diff";
    case Statistic::W1Tilde: return "w1-tilde";
    case Statistic::W2Tilde: return "w2-tilde";
  }
  throw std::logic_error("unknown statistic");
}

int statistic_atom_count(Statistic statistic, int n) {
  switch (statistic) {
    case Statistic::SqrtNM1:
    case Statistic::SqrtNM2:
    case Statistic::QuarterNM1:
      return n / 2 + 1;
    case Statistic::HalfSqrtNDiff:
    case Statistic::W1Tilde:
    case Statistic::W2Tilde:
      return n + 1;
  }
  throw std::logic_error("unknown statistic");
}

int statistic_index(Statistic statistic, int n, int k1, int k2) {
  switch (statistic) {
    case Statistic::SqrtNM1:
    case Statistic::QuarterNM1:
      return k1;
    case Statistic::SqrtNM2:
      return k2;
    case Statistic::HalfSqrtNDiff:
    case Statistic::W2Tilde:
      return k1 - k2 + n / 2;
    case Statistic::W1Tilde:
      return k1 + k2;
  }
  throw std::logic_error("unknown statistic");
}

double statistic_location(Statistic statistic, int n, int index) {
  switch (statistic) {
    case Statistic::SqrtNM1:
    case Statistic::SqrtNM2:
      return std::sqrt(static_cast<double>(n)) * magnetization_of_count(index, n);
    case Statistic::QuarterNM1:
      return std::pow(static_cast<double>(n), 0.25) * magnetization_of_count(index, n);
    case Statistic::HalfSqrtNDiff:
    case Statistic::W2Tilde: {
      // m1 - m2 = 4 (k1 - k2) / n; index = k1 - k2 + n/2.
      const long long diff = index - n / 2;
      return 0.5 * std::sqrt(static_cast<double>(n)) *
             (static_cast<double>(4 * diff) / static_cast<double>(n));
    }
    case Statistic::W1Tilde: {
      // m1 + m2 = (4 (k1 + k2) - 2n) / n; index = k1 + k2.
      const long long sum = index;
      return 0.5 * std::sqrt(static_cast<double>(n)) *
             (static_cast<double>(4 * sum - 2LL * n) / static_cast<double>(n));
    }
  }
  throw std::logic_error("unknown statistic");
}

double DiscreteLaw1D::mean() const {
  CompensatedSum sum;
  for (const Atom& a : atoms) sum.add(a.location * a.probability);
  return sum.value();
}

double DiscreteLaw1D::second_moment() const {
  CompensatedSum sum;
  for (const Atom& a : atoms) sum.add(a.location * a.location * a.probability);
  return sum.value();
}

double DiscreteLaw1D::variance() const {
  const double mu = mean();
  return second_moment() - mu * mu;
}

double DiscreteLaw1D::cdf(double x) const {
  CompensatedSum sum;
  for (const Atom& a : atoms) {
    if (a.location > x) break;
    sum.add(a.probability);
  }
  return sum.value();
}

void validate_law(const DiscreteLaw1D& law) {
  CompensatedSum mass;
  double previous = kNegInf;
  for (const DiscreteLaw1D::Atom& a : law.atoms) {
    if (!(a.location > previous)) {
      throw std::invalid_argument("law atoms must be strictly increasing in location");
    }
    if (!(a.probability >= 0.0)) {
      throw std::invalid_argument("law probabilities must be nonnegative");
    }
    previous = a.location;
    mass.add(a.probability);
  }
  if (std::abs(mass.value() - 1.0) > 1e-12) {
    throw std::invalid_argument("law probabilities must sum to 1 within 1e-12");
  }
}

DiscreteLaw1D pushforward(const ExactDistribution& dist, Statistic statistic) {
  const int n = dist.params.n;
  const int side = dist.side();
  std::vector<CompensatedSum> mass(statistic_atom_count(statistic, n));
  for (int k1 = 0; k1 < side; ++k1) {
    for (int k2 = 0; k2 < side; ++k2) {
      mass[statistic_index(statistic, n, k1, k2)].add(dist.prob(k1, k2));
    }
  }
  DiscreteLaw1D law;
  law.atoms.resize(mass.size());
  for (std::size_t i = 0; i < mass.size(); ++i) {
    law.atoms[i] = {statistic_location(statistic, n, static_cast<int>(i)), mass[i].value()};
  }
  return law;
}

MomentSummary moments(const ExactDistribution& dist) {
  const int side = dist.side();
  const double scale = std::sqrt(static_cast<double>(dist.params.n));
  CompensatedSum ex, ey, exx, eyy, exy;
  for (int k1 = 0; k1 < side; ++k1) {
    const double x = scale * dist.m_value(k1);
    for (int k2 = 0; k2 < side; ++k2) {
      const double y = scale * dist.m_value(k2);
      const double p = dist.prob(k1, k2);
      ex.add(x * p);
      ey.add(y * p);
      exx.add(x * x * p);
      eyy.add(y * y * p);
      exy.add(x * y * p);
    }
  }
  MomentSummary out;
  out.mean[0] = ex.value();
  out.mean[1] = ey.value();
  out.cov[0][0] = exx.value() - out.mean[0] * out.mean[0];
  out.cov[1][1] = eyy.value() - out.mean[1] * out.mean[1];
  out.cov[0][1] = out.cov[1][0] = exy.value() - out.mean[0] * out.mean[1];
  return out;
}

double log_prob_region(const ExactDistribution& dist, std::span<const Point2> centers,
                       double epsilon) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon must be positive");
  if (centers.empty()) throw std::invalid_argument("at least one center is required");
  for (const Point2& c : centers) {
    if (!(std::abs(c.m1) <= 1.0) || !(std::abs(c.m2) <= 1.0)) {
      throw std::invalid_argument("centers must lie in [-1, 1]^2");
    }
  }
  const int side = dist.side();
  const double eps2 = epsilon * epsilon;
  const auto outside = [&](int k1, int k2) {
    const double m1 = dist.m_value(k1);
    const double m2 = dist.m_value(k2);
    for (const Point2& c : centers) {
      const double d1 = m1 - c.m1;
      const double d2 = m2 - c.m2;
      if (d1 * d1 + d2 * d2 < eps2) return false;
    }
    return true;
  };

  double shift = kNegInf;
  for (int k1 = 0; k1 < side; ++k1) {
    for (int k2 = 0; k2 < side; ++k2) {
      if (outside(k1, k2)) shift = std::max(shift, dist.log_weight_at(k1, k2));
    }
  }
  if (shift == kNegInf) return kNegInf;

  CompensatedSum sum;
  for (int k1 = 0; k1 < side; ++k1) {
    for (int k2 = 0; k2 < side; ++k2) {
      if (outside(k1, k2)) sum.add(std::exp(dist.log_weight_at(k1, k2) - shift));
    }
  }
  return shift + std::log(sum.value()) - dist.log_z;
}

void write_grid_csv(const ExactDistribution& dist, std::ostream& out) {
  out << "k1,k2,m1,m2,prob\n";
  const int side = dist.side();
  char line[160];
  for (int k1 = 0; k1 < side; ++k1) {
    for (int k2 = 0; k2 < side; ++k2) {
      std::snprintf(line, sizeof line, "%d,%d,%.17g,%.17g,%.16e\n", k1, k2,
                    dist.m_value(k1), dist.m_value(k2), dist.prob(k1, k2));
      out << line;
    }
  }
}

}  // namespace blockspin
