#include "blockspin/mcmc.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <ostream>
#include <stdexcept>

#include "blockspin/parallel.hpp"
#include "blockspin/rng.hpp"

#include "json.hpp"

namespace blockspin {

const char* dynamics_name(Dynamics d) {
  switch (d) {
    case Dynamics::Glauber: return "glauber";
    case Dynamics::Metropolis: return "metropolis";
  }
  throw std::logic_error("unknown dynamics");
}

const char* chain_init_name(ChainInit init) {
  switch (init) {
    case ChainInit::AllUp: return "all-up";
    case ChainInit::Random: return "random";
  }
  throw std::logic_error("unknown chain init");
}

void validate_chain_config(const ChainConfig& config) {
  if (config.sweeps <= 0) throw std::invalid_argument("sweeps must be positive");
  if (config.burn_in < 0) throw std::invalid_argument("burn_in must be nonnegative");
  if (config.burn_in >= config.sweeps) {
    throw std::invalid_argument("burn_in must leave at least one recorded sweep");
  }
  if (config.thin < 1) throw std::invalid_argument("thin must be >= 1");
}

double flip_delta_energy(const ModelParams& params, int k1, int k2, int block, Spin spin) {
  const int half = params.block_size();
  if (k1 < 0 || k1 > half || k2 < 0 || k2 > half) {
    throw std::out_of_range("block counts outside [0, n/2]");
  }
  if (block != 0 && block != 1) throw std::invalid_argument("block must be 0 or 1");
  if (spin != 1 && spin != -1) throw std::invalid_argument("spin must be +1 or -1");
  const int delta = spin == 1 ? -1 : 1;
  const int new_k1 = block == 0 ? k1 + delta : k1;
  const int new_k2 = block == 1 ? k2 + delta : k2;
  if (new_k1 < 0 || new_k1 > half || new_k2 < 0 || new_k2 > half) {
    throw std::invalid_argument("no such spin to flip in the given state");
  }
  const int n = params.n;
  return hamiltonian_m(params, magnetization_of_count(new_k1, n),
                       magnetization_of_count(new_k2, n)) -
         hamiltonian_m(params, magnetization_of_count(k1, n),
                       magnetization_of_count(k2, n));
}

double acceptance_probability(Dynamics dynamics, double delta_energy) {
  if (dynamics == Dynamics::Glauber) {
    return 1.0 / (1.0 + std::exp(delta_energy));
  }
  return delta_energy <= 0.0 ? 1.0 : std::exp(-delta_energy);
}

namespace {

// Acceptance probabilities for every (k1, k2, block, current spin).  The
// state space is small enough that the table replaces all transcendental
// work in the sweep loop.
class AcceptanceTable {
 public:
  AcceptanceTable(const ModelParams& params, Dynamics dynamics)
      : half_(params.block_size()), table_(4 * static_cast<std::size_t>(half_ + 1) * (half_ + 1)) {
    const int side = half_ + 1;
    for (int k1 = 0; k1 < side; ++k1) {
      for (int k2 = 0; k2 < side; ++k2) {
        for (int block = 0; block < 2; ++block) {
          for (int up = 0; up < 2; ++up) {
            const Spin spin = up ? Spin{1} : Spin{-1};
            const int count = block == 0 ? k1 : k2;
            // A +1 flip needs an up spin present, a -1 flip a down spin.
            const bool feasible = up ? count > 0 : count < half_;
            if (!feasible) continue;
            table_[index(k1, k2, block, up)] = acceptance_probability(
                dynamics, flip_delta_energy(params, k1, k2, block, spin));
          }
        }
      }
    }
  }

  double at(int k1, int k2, int block, bool up) const {
    return table_[index(k1, k2, block, up ? 1 : 0)];
  }

 private:
  std::size_t index(int k1, int k2, int block, int up) const {
    return ((static_cast<std::size_t>(k1) * (half_ + 1) + k2) * 2 + block) * 2 + up;
  }

  int half_;
  std::vector<double> table_;
};

}  // namespace

SampleSet run_chain(const ModelParams& params, const ChainConfig& config, bool debug_checks) {
  validate_chain_config(config);
  const int n = params.n;
  const int half = params.block_size();
  const AcceptanceTable accept(params, config.dynamics);

  Xoshiro256PlusPlus rng(config.seed);
  std::vector<Spin> spins(n, Spin{1});
  int k1 = half;
  int k2 = half;
  if (config.init == ChainInit::Random) {
    k1 = 0;
    k2 = 0;
    for (int i = 0; i < n; ++i) {
      const bool up = (rng.next() & 1ull) != 0;
      spins[i] = up ? Spin{1} : Spin{-1};
      if (up) ++(i < half ? k1 : k2);
    }
  }

  SampleSet out{params, config, 1, {}, {}};
  const long long recorded =
      (config.sweeps - config.burn_in + config.thin - 1) / config.thin;
  out.records.reserve(static_cast<std::size_t>(recorded));

  for (long long sweep = 1; sweep <= config.sweeps; ++sweep) {
    for (int step = 0; step < n; ++step) {
      const int site = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(n)));
      const Spin spin = spins[site];
      const int block = site < half ? 0 : 1;
      const double p = accept.at(k1, k2, block, spin == 1);
      // The acceptance variate is always drawn, so the stream position
      // after a proposal never depends on the outcome.
      const double u = rng.next_unit();
      if (u < p) {
        spins[site] = static_cast<Spin>(-spin);
        (block == 0 ? k1 : k2) += spin == 1 ? -1 : 1;
      }
    }
    if (debug_checks) {
      int c1 = 0;
      int c2 = 0;
      for (int i = 0; i < n; ++i) {
        if (spins[i] == 1) ++(i < half ? c1 : c2);
      }
      if (c1 != k1 || c2 != k2) {
        throw std::logic_error("block count bookkeeping diverged from the spins");
      }
    }
    if (sweep > config.burn_in && (sweep - config.burn_in) % config.thin == 0) {
      out.records.push_back({sweep, k1, k2});
    }
  }
  out.records_per_chain = {out.records.size()};
  return out;
}

SampleSet run_chains(const ModelParams& params, const ChainConfig& config, int chains,
                     int threads) {
  validate_chain_config(config);
  if (chains < 1) throw std::invalid_argument("at least one chain is required");
  std::vector<SampleSet> parts(chains, SampleSet{params, config, 1, {}, {}});
  parallel_chunks(0, chains, threads, [&](int lo, int hi) {
    for (int c = lo; c < hi; ++c) {
      ChainConfig chain_config = config;
      chain_config.seed = config.seed ^ static_cast<std::uint64_t>(c);
      parts[c] = run_chain(params, chain_config, false);
    }
  });
  SampleSet out{params, config, chains, {}, {}};
  std::size_t total = 0;
  for (const SampleSet& part : parts) total += part.records.size();
  out.records.reserve(total);
  for (SampleSet& part : parts) {
    out.records_per_chain.push_back(part.records.size());
    out.records.insert(out.records.end(), part.records.begin(), part.records.end());
  }
  return out;
}

DiscreteLaw1D empirical_law(const SampleSet& samples, Statistic statistic) {
  if (samples.records.empty()) throw std::invalid_argument("sample set is empty");
  const int n = samples.params.n;
  std::vector<long long> counts(statistic_atom_count(statistic, n), 0);
  for (const SampleRecord& r : samples.records) {
    ++counts[statistic_index(statistic, n, r.k1, r.k2)];
  }
  const double total = static_cast<double>(samples.records.size());
  DiscreteLaw1D law;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    if (counts[i] == 0) continue;
    law.atoms.push_back({statistic_location(statistic, n, static_cast<int>(i)),
                         static_cast<double>(counts[i]) / total});
  }
  return law;
}

void write_samples_csv(const SampleSet& samples, std::ostream& out) {
  out << "sweep,m1,m2\n";
  char line[96];
  for (const SampleRecord& r : samples.records) {
    std::snprintf(line, sizeof line, "%lld,%.17g,%.17g\n", r.sweep, samples.m1_of(r),
                  samples.m2_of(r));
    out << line;
  }
}

void write_samples_metadata_json(const SampleSet& samples, std::ostream& out,
                                 bool include_timestamp) {
  nlohmann::json j{
      {"schema", "blockspin/samples/v1"},
      {"params",
       {{"alpha", samples.params.alpha}, {"beta", samples.params.beta}, {"n", samples.params.n}}},
      {"seed", samples.config.seed},
      {"dynamics", dynamics_name(samples.config.dynamics)},
      {"init", chain_init_name(samples.config.init)},
      {"sweeps", samples.config.sweeps},
      {"burn_in", samples.config.burn_in},
      {"thin", samples.config.thin},
      {"chains", samples.chains},
      {"records_total", samples.records.size()},
      {"records_per_chain", samples.records_per_chain},
  };
  if (include_timestamp) {
    const std::time_t now =
        std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    char stamp[32];
    std::strftime(stamp, sizeof stamp, "%FT%TZ", std::gmtime(&now));
    j["generated_at"] = stamp;
  }
  out << j.dump(2) << '\n';
}

}  // namespace blockspin
