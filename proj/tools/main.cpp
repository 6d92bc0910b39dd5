// Command-line front end: exact laws, pushforwards, phase diagram, rate
// functions, fixed points, samplers and the verification drivers.
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "blockspin/exact.hpp"
#include "blockspin/limits.hpp"
#include "blockspin/mcmc.hpp"
#include "blockspin/model.hpp"
#include "blockspin/verify.hpp"

namespace {

using nlohmann::json;

constexpr const char* kVersion = "1.0.0";

struct GlobalOptions {
  int threads = 0;
  bool threads_set = false;
  bool no_meta = false;
  int max_n = 20000;
};

// --threads wins over the BLOCKSPIN_THREADS environment variable; both use
// 0 to mean "all hardware threads".
int resolve_threads(const GlobalOptions& global) {
  if (global.threads_set) return global.threads;
  if (const char* env = std::getenv("BLOCKSPIN_THREADS")) {
    char* end = nullptr;
    const long value = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || value < 0) {
      throw std::invalid_argument("BLOCKSPIN_THREADS must be a nonnegative integer");
    }
    return static_cast<int>(value);
  }
  return 0;
}

// Streams to stdout by default, or to a file opened in binary mode so the
// emitted bytes land on disk unchanged.
class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty()) {
      file_.open(path, std::ios::binary);
      if (!file_) throw std::runtime_error("cannot open output file: " + path);
    }
  }

  std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }

 private:
  std::ofstream file_;
};

std::string timestamp_utc() {
  const std::time_t now =
      std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  char buffer[32];
  std::strftime(buffer, sizeof buffer, "%FT%TZ", std::gmtime(&now));
  return buffer;
}

void attach_meta(json& payload, const GlobalOptions& global) {
  if (global.no_meta) return;
  payload["meta"] = {{"generator", std::string("blockspin ") + kVersion},
                     {"generated_at", timestamp_utc()}};
}

// Regime boundaries compare alpha + beta with 2 exactly; flag inputs that
// sit within rounding distance of the line but not on it.
void warn_near_critical(double alpha, double beta) {
  const double sum = alpha + beta;
  if (sum != 2.0 && std::abs(sum - 2.0) < 1e-9) {
    std::cerr << "warning: alpha + beta differs from the critical value 2 by less than"
                 " 1e-9; classification uses the exact floating-point sum\n";
  }
}

json params_json(double alpha, double beta) {
  return {{"alpha", alpha}, {"beta", beta}};
}

void write_law_csv(const blockspin::DiscreteLaw1D& law, std::ostream& out) {
  out << "location,probability\n";
  char line[80];
  for (const auto& atom : law.atoms) {
    std::snprintf(line, sizeof line, "%.17g,%.16e\n", atom.location, atom.probability);
    out << line;
  }
}

int run_exact(double alpha, double beta, int n, const std::string& format,
              const std::string& out, const GlobalOptions& global) {
  const blockspin::ExactDistribution dist = blockspin::exact_distribution(
      blockspin::ModelParams(alpha, beta, n), {global.max_n, resolve_threads(global)});
  Output output(out);
  if (format == "csv") {
    blockspin::write_grid_csv(dist, output.stream());
    return 0;
  }
  json cells = json::array();
  for (int k1 = 0; k1 < dist.side(); ++k1) {
    for (int k2 = 0; k2 < dist.side(); ++k2) {
      cells.push_back({{"k1", k1},
                       {"k2", k2},
                       {"m1", dist.m_value(k1)},
                       {"m2", dist.m_value(k2)},
                       {"prob", dist.prob(k1, k2)}});
    }
  }
  json payload{{"schema", "blockspin/grid/v1"},
               {"params", {{"alpha", alpha}, {"beta", beta}, {"n", n}}},
               {"log_z", dist.log_z},
               {"cells", std::move(cells)}};
  attach_meta(payload, global);
  output.stream() << payload.dump(2) << '\n';
  return 0;
}

int run_pushforward(double alpha, double beta, int n, blockspin::Statistic statistic,
                    const std::string& format, const std::string& out,
                    const GlobalOptions& global) {
  const blockspin::ExactDistribution dist = blockspin::exact_distribution(
      blockspin::ModelParams(alpha, beta, n), {global.max_n, resolve_threads(global)});
  const blockspin::DiscreteLaw1D law = blockspin::pushforward(dist, statistic);
  Output output(out);
  if (format == "csv") {
    write_law_csv(law, output.stream());
    return 0;
  }
  json atoms = json::array();
  for (const auto& atom : law.atoms) {
    atoms.push_back({{"location", atom.location}, {"probability", atom.probability}});
  }
  json payload{{"schema", "blockspin/law/v1"},
               {"params", {{"alpha", alpha}, {"beta", beta}, {"n", n}}},
               {"statistic", blockspin::statistic_name(statistic)},
               {"atoms", std::move(atoms)}};
  attach_meta(payload, global);
  output.stream() << payload.dump(2) << '\n';
  return 0;
}

int run_phase(double alpha, double beta, const std::string& out,
              const GlobalOptions& global) {
  warn_near_critical(alpha, beta);
  const blockspin::Regime regime = blockspin::classify_regime(alpha, beta);
  const blockspin::DiracMixture mixture = blockspin::limit_mixture(alpha, beta);
  json atoms = json::array();
  for (const auto& atom : mixture.atoms) {
    atoms.push_back({{"m1", atom.m1}, {"m2", atom.m2}, {"weight", atom.weight}});
  }
  json payload{{"schema", "blockspin/phase/v1"},
               {"params", params_json(alpha, beta)},
               {"regime", blockspin::regime_name(regime)},
               {"atoms", std::move(atoms)}};
  attach_meta(payload, global);
  Output output(out);
  output.stream() << payload.dump(2) << '\n';
  return 0;
}

int run_ratefn(double alpha, double beta, int grid, const std::string& which,
               const std::string& format, const std::string& out,
               const GlobalOptions& global) {
  warn_near_critical(alpha, beta);
  // J and Jv live on the per-spin block sums in [-1/2, 1/2]; Jm on the
  // block magnetizations in [-1, 1].  All are finite on those squares.
  const double bound = which == "Jm" ? 1.0 : 0.5;
  std::optional<blockspin::TiltedRate> tilted;
  if (which != "J") tilted.emplace(alpha, beta);
  const auto value = [&](double x, double y) {
    if (which == "J") return blockspin::rate_J(x, y);
    if (which == "Jv") return tilted->in_v_coordinates(x, y);
    return (*tilted)(x, y);
  };

  Output output(out);
  json values = json::array();
  if (format == "csv") output.stream() << "x1,x2,value\n";
  char line[96];
  for (int i = 0; i < grid; ++i) {
    const double x = -bound + 2.0 * bound * i / (grid - 1);
    for (int j = 0; j < grid; ++j) {
      const double y = -bound + 2.0 * bound * j / (grid - 1);
      const double v = value(x, y);
      if (format == "csv") {
        std::snprintf(line, sizeof line, "%.17g,%.17g,%.17g\n", x, y, v);
        output.stream() << line;
      } else {
        values.push_back({{"x1", x}, {"x2", y}, {"value", v}});
      }
    }
  }
  if (format == "csv") return 0;
  json payload{{"schema", "blockspin/ratefn/v1"},
               {"params", params_json(alpha, beta)},
               {"which", which},
               {"grid", grid},
               {"values", std::move(values)}};
  attach_meta(payload, global);
  output.stream() << payload.dump(2) << '\n';
  return 0;
}

int run_fixedpoints(double alpha, double beta, const std::string& out,
                    const GlobalOptions& global) {
  warn_near_critical(alpha, beta);
  const auto points = blockspin::mean_field_fixed_points(alpha, beta);
  json solutions = json::array();
  for (const auto& p : points) {
    const blockspin::HessianResult hess =
        blockspin::hessian_tilted_objective(alpha, beta, p.x1, p.x2);
    const auto eigen = hess.matrix.eigenvalues();
    solutions.push_back(
        {{"x1", p.x1},
         {"x2", p.x2},
         {"hessian",
          {{"h11", hess.matrix.h11}, {"h12", hess.matrix.h12}, {"h22", hess.matrix.h22}}},
         {"eigenvalues", {eigen[0], eigen[1]}},
         {"definiteness", blockspin::definiteness_name(hess.definiteness)}});
  }
  json payload{{"schema", "blockspin/fixedpoints/v1"},
               {"params", params_json(alpha, beta)},
               {"solutions", std::move(solutions)}};
  attach_meta(payload, global);
  Output output(out);
  output.stream() << payload.dump(2) << '\n';
  return 0;
}

int run_sample(double alpha, double beta, int n, const blockspin::ChainConfig& config,
               int chains, const std::string& out, const std::string& meta_out,
               const GlobalOptions& global) {
  const blockspin::ModelParams params(alpha, beta, n);
  const blockspin::SampleSet samples =
      blockspin::run_chains(params, config, chains, resolve_threads(global));
  {
    Output output(out);
    blockspin::write_samples_csv(samples, output.stream());
  }
  if (!meta_out.empty()) {
    Output output(meta_out);
    blockspin::write_samples_metadata_json(samples, output.stream(), !global.no_meta);
  }
  return 0;
}

int finish_verify(const blockspin::ComparisonReport& report, const std::string& format,
                  const std::string& out, const GlobalOptions& global) {
  Output output(out);
  if (format == "csv") {
    blockspin::write_report_csv(report, output.stream());
  } else {
    json payload = json::parse(blockspin::report_json(report));
    attach_meta(payload, global);
    output.stream() << payload.dump(2) << '\n';
  }
  return report.pass ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-block mean-field Ising model: exact finite-n laws, limit laws,"
               " rate functions and samplers"};
  app.require_subcommand(0, 1);
  app.fallthrough();  // global flags may appear after the subcommand name
  app.set_version_flag("--version", std::string("blockspin ") + kVersion);

  GlobalOptions global;
  auto* threads_option = app.add_option(
      "--threads", global.threads,
      "worker threads; 0 = all cores (overrides BLOCKSPIN_THREADS)");
  threads_option->check(CLI::NonNegativeNumber);
  app.add_flag("--no-meta", global.no_meta,
               "omit generator metadata (including timestamps) from outputs");
  app.add_option("--max-n", global.max_n, "refuse exact grids beyond this n")
      ->check(CLI::PositiveNumber);

  const std::map<std::string, blockspin::Statistic> statistic_map{
      {"sqrtn-m1", blockspin::Statistic::SqrtNM1},
      {"sqrtn-m2", blockspin::Statistic::SqrtNM2},
      {"quartern-m1", blockspin::Statistic::QuarterNM1},
      {"half-sqrtn-diff", blockspin::Statistic::HalfSqrtNDiff},
      {"w1-tilde", blockspin::Statistic::W1Tilde},
      {"w2-tilde", blockspin::Statistic::W2Tilde}};
  const std::map<std::string, blockspin::Dynamics> dynamics_map{
      {"glauber", blockspin::Dynamics::Glauber},
      {"metropolis", blockspin::Dynamics::Metropolis}};
  const std::map<std::string, blockspin::ChainInit> init_map{
      {"all-up", blockspin::ChainInit::AllUp}, {"random", blockspin::ChainInit::Random}};

  double alpha = 0.0;
  double beta = 0.0;
  int n = 2;
  std::string out;
  std::string format = "csv";

  auto add_couplings = [&](CLI::App* cmd) {
    cmd->add_option("--alpha", alpha, "cross-block coupling")->required();
    cmd->add_option("--beta", beta, "in-block coupling")->required();
  };
  auto add_output = [&](CLI::App* cmd) {
    cmd->add_option("--out", out, "output file (default: stdout)");
    cmd->add_option("--format", format, "output format: csv (default) or json")
        ->check(CLI::IsMember({"csv", "json"}));
  };

  CLI::App* exact_cmd = app.add_subcommand("exact", "exact law of the block counts");
  add_couplings(exact_cmd);
  exact_cmd->add_option("-n,--size", n, "number of spins (even)")->required();
  add_output(exact_cmd);

  blockspin::Statistic statistic = blockspin::Statistic::SqrtNM1;
  CLI::App* push_cmd =
      app.add_subcommand("pushforward", "exact law of a scalar statistic");
  add_couplings(push_cmd);
  push_cmd->add_option("-n,--size", n, "number of spins (even)")->required();
  push_cmd->add_option("--stat", statistic, "statistic to push forward")
      ->required()
      ->transform(CLI::CheckedTransformer(statistic_map, CLI::ignore_case));
  add_output(push_cmd);

  CLI::App* phase_cmd =
      app.add_subcommand("phase", "regime classification and limit mixture");
  add_couplings(phase_cmd);
  phase_cmd->add_option("--out", out, "output file (default: stdout)");

  int grid = 101;
  std::string which = "J";
  CLI::App* ratefn_cmd = app.add_subcommand("ratefn", "rate function on a grid");
  add_couplings(ratefn_cmd);
  ratefn_cmd->add_option("--grid", grid, "points per axis")->check(CLI::Range(2, 100000));
  ratefn_cmd->add_option("--which", which, "J (product reference), Jv or Jm")
      ->check(CLI::IsMember({"J", "Jv", "Jm"}));
  add_output(ratefn_cmd);

  CLI::App* fixed_cmd = app.add_subcommand(
      "fixedpoints", "mean-field fixed points with hessian classification");
  add_couplings(fixed_cmd);
  fixed_cmd->add_option("--out", out, "output file (default: stdout)");

  blockspin::ChainConfig chain_config;
  int chains = 1;
  std::string meta_out;
  CLI::App* sample_cmd = app.add_subcommand("sample", "run the single-site sampler");
  add_couplings(sample_cmd);
  sample_cmd->add_option("-n,--size", n, "number of spins (even)")->required();
  sample_cmd->add_option("--sweeps", chain_config.sweeps, "sweeps per chain");
  sample_cmd->add_option("--burn-in", chain_config.burn_in, "unrecorded leading sweeps");
  sample_cmd->add_option("--thin", chain_config.thin, "record every thin-th sweep");
  sample_cmd->add_option("--chains", chains, "independent chains")->check(CLI::PositiveNumber);
  sample_cmd->add_option("--seed", chain_config.seed, "base seed; chain c uses seed XOR c");
  sample_cmd->add_option("--dynamics", chain_config.dynamics, "update rule")
      ->transform(CLI::CheckedTransformer(dynamics_map, CLI::ignore_case));
  sample_cmd->add_option("--init", chain_config.init, "initial configuration")
      ->transform(CLI::CheckedTransformer(init_map, CLI::ignore_case));
  sample_cmd->add_option("--out", out, "samples CSV (default: stdout)");
  sample_cmd->add_option("--meta-out", meta_out, "metadata JSON file");

  blockspin::VerifyOptions verify_options;
  std::vector<int> clt_sizes{200, 800, 3200};
  std::vector<int> critical_sizes{400, 1600, 6400};
  std::vector<int> conc_sizes{100, 200, 400, 800, 1600};
  double epsilon = 0.1;
  std::string verify_format = "json";
  CLI::App* verify_cmd =
      app.add_subcommand("verify", "compare finite-n laws against their limits");
  verify_cmd->require_subcommand(1);
  auto add_verify_output = [&](CLI::App* cmd) {
    cmd->add_option("--out", out, "output file (default: stdout)");
    cmd->add_option("--format", verify_format, "output format: json (default) or csv")
        ->check(CLI::IsMember({"csv", "json"}));
    cmd->add_option("--final-ks", verify_options.final_ks,
                    "bound on the last Kolmogorov distance");
  };

  CLI::App* clt_cmd = verify_cmd->add_subcommand("clt", "gaussian fluctuations");
  add_couplings(clt_cmd);
  clt_cmd->add_option("--sizes", clt_sizes, "system sizes")->delimiter(',');
  add_verify_output(clt_cmd);

  CLI::App* critical_cmd =
      verify_cmd->add_subcommand("critical", "critical-line fluctuations");
  add_couplings(critical_cmd);
  critical_cmd->add_option("--sizes", critical_sizes, "system sizes")->delimiter(',');
  add_verify_output(critical_cmd);

  CLI::App* conc_cmd =
      verify_cmd->add_subcommand("concentration", "exponential concentration");
  add_couplings(conc_cmd);
  conc_cmd->add_option("--sizes", conc_sizes, "system sizes")->delimiter(',');
  conc_cmd->add_option("--epsilon", epsilon, "ball radius around the limit atoms")
      ->required();
  conc_cmd->add_option("--slope-band", verify_options.slope_band_factor,
                       "allowed factor between decay slope and rate infimum");
  add_verify_output(conc_cmd);

  CLI::App* mcmc_cmd = verify_cmd->add_subcommand("mcmc", "sampler against the exact law");
  add_couplings(mcmc_cmd);
  mcmc_cmd->add_option("-n,--size", n, "number of spins (even)")->required();
  mcmc_cmd->add_option("--sweeps", chain_config.sweeps, "sweeps per chain");
  mcmc_cmd->add_option("--burn-in", chain_config.burn_in, "unrecorded leading sweeps");
  mcmc_cmd->add_option("--thin", chain_config.thin, "record every thin-th sweep");
  mcmc_cmd->add_option("--chains", chains, "independent chains")->check(CLI::PositiveNumber);
  mcmc_cmd->add_option("--seed", chain_config.seed, "base seed");
  mcmc_cmd->add_option("--dynamics", chain_config.dynamics, "update rule")
      ->transform(CLI::CheckedTransformer(dynamics_map, CLI::ignore_case));
  mcmc_cmd->add_option("--tv", verify_options.tv_threshold, "total variation bound");
  add_verify_output(mcmc_cmd);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  global.threads_set = threads_option->count() > 0;

  try {
    verify_options.threads = resolve_threads(global);
    verify_options.max_n = global.max_n;
    if (app.got_subcommand(exact_cmd)) {
      return run_exact(alpha, beta, n, format, out, global);
    }
    if (app.got_subcommand(push_cmd)) {
      return run_pushforward(alpha, beta, n, statistic, format, out, global);
    }
    if (app.got_subcommand(phase_cmd)) {
      return run_phase(alpha, beta, out, global);
    }
    if (app.got_subcommand(ratefn_cmd)) {
      return run_ratefn(alpha, beta, grid, which, format, out, global);
    }
    if (app.got_subcommand(fixed_cmd)) {
      return run_fixedpoints(alpha, beta, out, global);
    }
    if (app.got_subcommand(sample_cmd)) {
      return run_sample(alpha, beta, n, chain_config, chains, out, meta_out, global);
    }
    if (app.got_subcommand(verify_cmd)) {
      if (verify_cmd->got_subcommand(clt_cmd)) {
        warn_near_critical(alpha, beta);
        return finish_verify(
            blockspin::verify_clt(alpha, beta, clt_sizes, verify_options), verify_format,
            out, global);
      }
      if (verify_cmd->got_subcommand(critical_cmd)) {
        warn_near_critical(alpha, beta);
        return finish_verify(
            blockspin::verify_critical(alpha, beta, critical_sizes, verify_options),
            verify_format, out, global);
      }
      if (verify_cmd->got_subcommand(conc_cmd)) {
        warn_near_critical(alpha, beta);
        return finish_verify(
            blockspin::verify_concentration(alpha, beta, conc_sizes, epsilon,
                                            verify_options),
            verify_format, out, global);
      }
      if (verify_cmd->got_subcommand(mcmc_cmd)) {
        return finish_verify(
            blockspin::verify_mcmc(alpha, beta, n, chain_config, chains, verify_options),
            verify_format, out, global);
      }
    }
    std::cerr << app.help();
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
