// Exact finite-n Gibbs law of the block up-spin counts, pushforwards to
// scalar statistics and region probabilities, all in log scale.
#pragma once

#include <iosfwd>
#include <span>
#include <vector>

#include "blockspin/model.hpp"

namespace blockspin {

// Law of the pair (k1, k2) where k_i counts up spins in block i.  Stored as
// unnormalized log weights on the (n/2+1) x (n/2+1) grid plus the log of
// their sum.
struct ExactDistribution {
  ModelParams params;
  std::vector<double> log_weight;  // row-major, index k1 * side + k2
  double log_z = 0.0;

  int side() const { return params.block_size() + 1; }

  double log_weight_at(int k1, int k2) const {
    return log_weight[static_cast<std::size_t>(k1) * side() + k2];
  }

  double prob(int k1, int k2) const;

  // Lattice magnetization of a block count, (4k - n)/n.
  double m_value(int k) const { return magnetization_of_count(k, params.n); }
};

struct ExactOptions {
  int max_n = 20000;  // refuse larger n; the grid holds (n/2+1)^2 doubles
  int threads = 0;    // 0 = all hardware threads
};

// Builds the law from binomial multiplicities and hamiltonian_m.  Row
// parallel; each cell depends only on its own (k1, k2), and the
// normalization combines per-row compensated sums in row order, so the
// result is bitwise independent of the thread count.
ExactDistribution exact_distribution(const ModelParams& params,
                                     const ExactOptions& options = {});

// Independent oracle: enumerates all 2^n spin configurations and scores each
// with hamiltonian_spin.  Only for n <= 20.
ExactDistribution brute_force_distribution(const ModelParams& params);

// Total variation distance between two laws on the same grid.
double total_variation(const ExactDistribution& a, const ExactDistribution& b);

// Scalar statistics of (m1, m2) whose exact laws live on a 1-d lattice.
enum class Statistic {
  SqrtNM1,        // sqrt(n) m1
  SqrtNM2,        // sqrt(n) m2
  QuarterNM1,     // n^{1/4} m1
  HalfSqrtNDiff,  // (sqrt(n)/2)(m1 - m2)
  W1Tilde,        // sqrt(n)(m1 + m2)/2
  W2Tilde,        // sqrt(n)(m1 - m2)/2, alias of HalfSqrtNDiff
};

const char* statistic_name(Statistic statistic);

// Atom lattice of a statistic for a given n.  Locations are computed from a
// single integer index so that cells mapping to the same atom coincide
// exactly, with no floating-point merge tolerance.
int statistic_atom_count(Statistic statistic, int n);
int statistic_index(Statistic statistic, int n, int k1, int k2);
double statistic_location(Statistic statistic, int n, int index);

// A finitely supported law on the real line, atoms sorted by location.
struct DiscreteLaw1D {
  struct Atom {
    double location;
    double probability;
  };
  std::vector<Atom> atoms;

  double mean() const;
  double second_moment() const;
  double variance() const;
  double cdf(double x) const;  // right-continuous step function
};

// Throws when atoms are unsorted, a probability is negative, or the total
// mass differs from 1 by more than 1e-12.
void validate_law(const DiscreteLaw1D& law);

DiscreteLaw1D pushforward(const ExactDistribution& dist, Statistic statistic);

// Mean and covariance of (sqrt(n) m1, sqrt(n) m2).
struct MomentSummary {
  double mean[2];
  double cov[2][2];
};

MomentSummary moments(const ExactDistribution& dist);

struct Point2 {
  double m1;
  double m2;
};

// log P((m1, m2) outside every open epsilon-ball around the centers), i.e.
// at euclidean distance >= epsilon from each center.  Returns -infinity when
// no grid point qualifies.
double log_prob_region(const ExactDistribution& dist, std::span<const Point2> centers,
                       double epsilon);

// CSV export with header k1,k2,m1,m2,prob.
void write_grid_csv(const ExactDistribution& dist, std::ostream& out);

}  // namespace blockspin
