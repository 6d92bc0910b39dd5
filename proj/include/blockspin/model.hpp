// Two-block mean-field Ising model: parameters, spin configurations and the
// Hamiltonian in both its spin-sum and block-magnetization forms.
#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace blockspin {

// Checks 0 <= alpha <= beta (throws std::invalid_argument otherwise).
void validate_couplings(double alpha, double beta);

// Couplings and system size.  The n spins are split into two blocks of size
// n/2: sites 0..n/2-1 and n/2..n-1.  beta couples pairs inside a block,
// alpha couples pairs across blocks.
struct ModelParams {
  double alpha = 0.0;
  double beta = 0.0;
  int n = 2;

  ModelParams(double alpha_, double beta_, int n_);

  int block_size() const { return n / 2; }
};

using Spin = std::int8_t;

// A point of {-1, +1}^n.
struct SpinConfiguration {
  std::vector<Spin> spins;

  static SpinConfiguration all_up(int n);
};

// Throws unless config has exactly n entries, all +-1.
void validate_configuration(const ModelParams& params, const SpinConfiguration& config);

enum class Regime {
  Subcritical,             // alpha + beta < 2
  CriticalLine,            // alpha + beta == 2
  SupercriticalCoupled,    // alpha + beta > 2, alpha > 0
  SupercriticalDecoupled,  // alpha + beta > 2, alpha == 0
};

std::string regime_name(Regime regime);

// Classification branches on the exact floating-point value of alpha + beta;
// landing on the critical line requires hitting 2.0 exactly.
Regime classify_regime(double alpha, double beta);

// Block magnetization lattice value (4k - n)/n for a block of n/2 spins with
// k of them up.  Exactly antisymmetric under k -> n/2 - k.
double magnetization_of_count(int k, int n);

// Energy as a function of the block magnetizations:
//   H = -(n/2) (alpha m1 m2 / 2 + beta (m1^2 + m2^2) / 4).
// The symmetric grouping keeps the value bit-identical under m1 <-> m2 and
// under (m1, m2) -> (-m1, -m2).
double hamiltonian_m(const ModelParams& params, double m1, double m2);

// Energy from the literal double sum over ordered spin pairs (diagonal
// included).  Quadratic in n; used as an oracle for hamiltonian_m.
double hamiltonian_spin(const ModelParams& params, const SpinConfiguration& config);

// Per-block averages (m1, m2) of a configuration with an even number of
// spins, first half versus second half.
std::pair<double, double> block_magnetizations(const SpinConfiguration& config);

}  // namespace blockspin
