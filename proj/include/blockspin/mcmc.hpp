// Single-site Markov chain samplers for the model, with reproducible
// streams and exports of the recorded block counts.
#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "blockspin/exact.hpp"
#include "blockspin/model.hpp"

namespace blockspin {

enum class Dynamics { Glauber, Metropolis };

const char* dynamics_name(Dynamics d);

enum class ChainInit { AllUp, Random };

const char* chain_init_name(ChainInit init);

struct ChainConfig {
  std::uint64_t seed = 0;
  long long sweeps = 1000;  // one sweep proposes n single-site flips
  long long burn_in = 0;    // leading sweeps that are not recorded
  long long thin = 1;       // record every thin-th sweep after burn-in
  Dynamics dynamics = Dynamics::Glauber;
  ChainInit init = ChainInit::AllUp;
};

// Requires sweeps > burn_in >= 0 and thin >= 1.
void validate_chain_config(const ChainConfig& config);

struct SampleRecord {
  long long sweep;  // 1-based sweep index within its chain
  int k1;           // up spins in block 1
  int k2;           // up spins in block 2
};

struct SampleSet {
  ModelParams params;
  ChainConfig config;
  int chains = 1;
  std::vector<SampleRecord> records;          // concatenated in chain order
  std::vector<std::size_t> records_per_chain;

  double m1_of(const SampleRecord& r) const { return magnetization_of_count(r.k1, params.n); }
  double m2_of(const SampleRecord& r) const { return magnetization_of_count(r.k2, params.n); }
};

// Energy change of flipping one site that currently holds `spin`, living in
// `block` (0 or 1), given the current block counts.  Computed from
// hamiltonian_m on the neighbouring lattice points, so it is exact in the
// same sense as the grid weights.
double flip_delta_energy(const ModelParams& params, int k1, int k2, int block, Spin spin);

// Glauber: 1/(1 + exp(delta)); Metropolis: min(1, exp(-delta)).
double acceptance_probability(Dynamics dynamics, double delta_energy);

// Runs one chain.  Each proposal draws a site index and an acceptance
// variate, in that order, so the stream layout is independent of the
// decisions taken.  With debug_checks the block counts are recounted from
// the spins after every sweep.
SampleSet run_chain(const ModelParams& params, const ChainConfig& config,
                    bool debug_checks = false);

// Runs `chains` chains in parallel; chain c uses config.seed XOR c.  The
// result is identical to running the chains one by one.
SampleSet run_chains(const ModelParams& params, const ChainConfig& config, int chains,
                     int threads = 0);

// Empirical law of a statistic: one atom per visited lattice point, with
// multiplicity-based probabilities.
DiscreteLaw1D empirical_law(const SampleSet& samples, Statistic statistic);

// CSV export with header sweep,m1,m2.
void write_samples_csv(const SampleSet& samples, std::ostream& out);

// JSON description of how the samples were generated (seed, dynamics,
// counts per chain).
void write_samples_metadata_json(const SampleSet& samples, std::ostream& out,
                                 bool include_timestamp = false);

}  // namespace blockspin
