#include "blockspin/model.hpp"

#include <cmath>
#include <stdexcept>

namespace blockspin {

void validate_couplings(double alpha, double beta) {
  // The negated comparisons also reject NaN.
  if (!(alpha >= 0.0) || !(alpha <= beta)) {
    throw std::invalid_argument("couplings must satisfy 0 <= alpha <= beta");
  }
}

ModelParams::ModelParams(double alpha_, double beta_, int n_)
    : alpha(alpha_), beta(beta_), n(n_) {
  validate_couplings(alpha, beta);
  if (n < 2 || n % 2 != 0) {
    throw std::invalid_argument("n must be an even integer >= 2");
  }
}

SpinConfiguration SpinConfiguration::all_up(int n) {
  if (n < 2 || n % 2 != 0) {
    throw std::invalid_argument("n must be an even integer >= 2");
  }
  return SpinConfiguration{std::vector<Spin>(n, Spin{1})};
}

void validate_configuration(const ModelParams& params, const SpinConfiguration& config) {
  if (static_cast<int>(config.spins.size()) != params.n) {
    throw std::invalid_argument("configuration length differs from n");
  }
  for (Spin s : config.spins) {
    if (s != 1 && s != -1) throw std::invalid_argument("spins must be +1 or -1");
  }
}

std::string regime_name(Regime regime) {
  switch (regime) {
    case Regime::Subcritical: return "subcritical";
    case Regime::CriticalLine: return "critical-line";
    case Regime::SupercriticalCoupled: return "supercritical-coupled";
    case Regime::SupercriticalDecoupled: return "supercritical-decoupled";
  }
  throw std::logic_error("unknown regime");
}

Regime classify_regime(double alpha, double beta) {
  validate_couplings(alpha, beta);
  const double sum = alpha + beta;
  if (sum < 2.0) return Regime::Subcritical;
  if (sum == 2.0) return Regime::CriticalLine;
  return alpha == 0.0 ? Regime::SupercriticalDecoupled : Regime::SupercriticalCoupled;
}

double magnetization_of_count(int k, int n) {
  return static_cast<double>(4LL * k - n) / static_cast<double>(n);
}

double hamiltonian_m(const ModelParams& params, double m1, double m2) {
  if (!(std::abs(m1) <= 1.0) || !(std::abs(m2) <= 1.0)) {
    throw std::domain_error("block magnetizations must lie in [-1, 1]");
  }
  // (m1 * m2) is grouped so the value is bitwise invariant under swapping
  // or jointly negating the blocks.
  return -(0.5 * params.n) *
         (0.5 * params.alpha * (m1 * m2) + 0.25 * params.beta * (m1 * m1 + m2 * m2));
}

double hamiltonian_spin(const ModelParams& params, const SpinConfiguration& config) {
  validate_configuration(params, config);
  const int half = params.n / 2;
  long long same_block = 0;
  long long cross_block = 0;
  for (int i = 0; i < params.n; ++i) {
    for (int j = 0; j < params.n; ++j) {
      const int product = static_cast<int>(config.spins[i]) * static_cast<int>(config.spins[j]);
      if ((i < half) == (j < half)) {
        same_block += product;
      } else {
        cross_block += product;
      }
    }
  }
  return -(params.beta * static_cast<double>(same_block) +
           params.alpha * static_cast<double>(cross_block)) /
         (2.0 * params.n);
}

std::pair<double, double> block_magnetizations(const SpinConfiguration& config) {
  const int n = static_cast<int>(config.spins.size());
  if (n < 2 || n % 2 != 0) {
    throw std::invalid_argument("configuration length must be even and >= 2");
  }
  const int half = n / 2;
  long long sum1 = 0;
  long long sum2 = 0;
  for (int i = 0; i < n; ++i) {
    const Spin s = config.spins[i];
    if (s != 1 && s != -1) throw std::invalid_argument("spins must be +1 or -1");
    (i < half ? sum1 : sum2) += s;
  }
  return {static_cast<double>(2 * sum1) / n, static_cast<double>(2 * sum2) / n};
}

}  // namespace blockspin
