// End-to-end checks of the command-line binary: exit codes, output shape,
// schema conformance and byte-level determinism.
#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"

#include "json.hpp"

using nlohmann::json;

namespace {

struct CommandResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

// Runs the CLI through the shell with stdout/stderr captured in temp files.
// An env prefix like "BLOCKSPIN_THREADS=3" may precede the binary.
CommandResult run_cli(const std::string& args, const std::string& env_prefix = {}) {
  static int counter = 0;
  const auto dir = std::filesystem::temp_directory_path();
  const auto out_path = dir / ("blockspin_cli_out_" + std::to_string(++counter));
  const auto err_path = dir / ("blockspin_cli_err_" + std::to_string(counter));
  std::string command = env_prefix.empty() ? std::string() : env_prefix + " ";
  command += std::string(BLOCKSPIN_CLI_PATH) + " " + args + " > " + out_path.string() +
             " 2> " + err_path.string();
  const int status = std::system(command.c_str());
  CommandResult result;
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  result.out = slurp(out_path);
  result.err = slurp(err_path);
  std::filesystem::remove(out_path);
  std::filesystem::remove(err_path);
  return result;
}

// Just enough of json-schema to check the documents this project emits:
// type, required, properties, items, enum, const.
bool conforms(const json& schema, const json& value, std::string& error) {
  if (schema.contains("const")) {
    if (value != schema["const"]) {
      error = "const mismatch, got " + value.dump();
      return false;
    }
  }
  if (schema.contains("enum")) {
    bool found = false;
    for (const auto& candidate : schema["enum"]) {
      if (value == candidate) {
        found = true;
        break;
      }
    }
    if (!found) {
      error = "enum mismatch, got " + value.dump();
      return false;
    }
  }
  if (schema.contains("type")) {
    const auto matches = [&](const std::string& type) {
      if (type == "object") return value.is_object();
      if (type == "array") return value.is_array();
      if (type == "string") return value.is_string();
      if (type == "integer") return value.is_number_integer();
      if (type == "number") return value.is_number();
      if (type == "boolean") return value.is_boolean();
      if (type == "null") return value.is_null();
      return false;
    };
    bool ok = false;
    if (schema["type"].is_array()) {
      for (const auto& type : schema["type"]) ok = ok || matches(type.get<std::string>());
    } else {
      ok = matches(schema["type"].get<std::string>());
    }
    if (!ok) {
      error = "type mismatch, got " + value.dump().substr(0, 60);
      return false;
    }
  }
  if (schema.contains("required") && value.is_object()) {
    for (const auto& key : schema["required"]) {
      if (!value.contains(key.get<std::string>())) {
        error = "missing required key " + key.get<std::string>();
        return false;
      }
    }
  }
  if (schema.contains("properties") && value.is_object()) {
    for (const auto& [key, sub_schema] : schema["properties"].items()) {
      if (!value.contains(key)) continue;
      if (!conforms(sub_schema, value.at(key), error)) {
        error = key + ": " + error;
        return false;
      }
    }
  }
  if (schema.contains("items") && value.is_array()) {
    for (const auto& element : value) {
      if (!conforms(schema["items"], element, error)) {
        error = "items: " + error;
        return false;
      }
    }
  }
  return true;
}

void check_schema(const std::string& name, const json& value) {
  const json schema =
      json::parse(slurp(std::filesystem::path(BLOCKSPIN_SCHEMA_DIR) / name));
  std::string error;
  const bool ok = conforms(schema, value, error);
  const std::string context = name + ": " + error;
  INFO(context);
  CHECK(ok);
}

int count_lines(const std::string& text) {
  int lines = 0;
  for (char c : text) {
    if (c == '\n') ++lines;
  }
  return lines;
}

}  // namespace

TEST_CASE("version, help and usage errors") {
  CHECK(run_cli("--version").exit_code == 0);
  CHECK(run_cli("--version").out.find("blockspin") != std::string::npos);
  CHECK(run_cli("--help").exit_code == 0);
  CHECK(run_cli("").exit_code == 1);
  CHECK(run_cli("--definitely-not-a-flag").exit_code == 1);
  CHECK(run_cli("exact --alpha 0.5 -n 4").exit_code == 1);  // missing --beta
  CHECK(run_cli("exact --alpha 0.5 --beta 1.0 -n 5").exit_code == 1);  // odd n
  const CommandResult bad = run_cli("exact --alpha 2.0 --beta 1.0 -n 4");
  CHECK(bad.exit_code == 1);
  CHECK(bad.err.find("error") != std::string::npos);
}

TEST_CASE("exact grid exports") {
  const CommandResult csv = run_cli("exact --alpha 0.5 --beta 1.0 -n 4");
  CHECK(csv.exit_code == 0);
  CHECK(csv.out.rfind("k1,k2,m1,m2,prob\n", 0) == 0);
  CHECK(count_lines(csv.out) == 10);  // header + 3x3 cells

  const CommandResult as_json =
      run_cli("exact --alpha 0.5 --beta 1.0 -n 4 --format json");
  CHECK(as_json.exit_code == 0);
  const json payload = json::parse(as_json.out);
  check_schema("grid.schema.json", payload);
  CHECK(payload.at("cells").size() == 9);
  CHECK(payload.contains("meta"));
  double mass = 0.0;
  for (const auto& cell : payload.at("cells")) mass += cell.at("prob").get<double>();
  CHECK(std::abs(mass - 1.0) < 1e-12);

  const CommandResult bare =
      run_cli("--no-meta exact --alpha 0.5 --beta 1.0 -n 4 --format json");
  CHECK(!json::parse(bare.out).contains("meta"));
}

TEST_CASE("pushforward exports") {
  const CommandResult csv =
      run_cli("pushforward --alpha 0.5 --beta 1.0 -n 4 --stat sqrtn-m1");
  CHECK(csv.exit_code == 0);
  CHECK(csv.out.rfind("location,probability\n", 0) == 0);
  CHECK(count_lines(csv.out) == 4);

  const CommandResult as_json = run_cli(
      "pushforward --alpha 0.5 --beta 1.5 -n 8 --stat quartern-m1 --format json");
  const json payload = json::parse(as_json.out);
  check_schema("law.schema.json", payload);
  CHECK(payload.at("statistic") == "quartern-m1");
  CHECK(payload.at("atoms").size() == 5);

  CHECK(run_cli("pushforward --alpha 0.5 --beta 1.0 -n 4 --stat nonsense").exit_code ==
        1);
}

TEST_CASE("phase classification with limit atoms") {
  const CommandResult sub = run_cli("phase --alpha 0.5 --beta 1.0");
  CHECK(sub.exit_code == 0);
  const json sub_payload = json::parse(sub.out);
  check_schema("phase.schema.json", sub_payload);
  CHECK(sub_payload.at("regime") == "subcritical");
  CHECK(sub_payload.at("atoms").size() == 1);
  CHECK(sub.err.empty());

  const json coupled = json::parse(run_cli("phase --alpha 1.0 --beta 2.0").out);
  CHECK(coupled.at("regime") == "supercritical-coupled");
  CHECK(coupled.at("atoms").size() == 2);
  CHECK(std::abs(std::abs(coupled.at("atoms")[0].at("m1").get<double>()) -
                 0.8585596366401104) < 1e-10);

  const json decoupled = json::parse(run_cli("phase --alpha 0 --beta 2.5").out);
  CHECK(decoupled.at("regime") == "supercritical-decoupled");
  CHECK(decoupled.at("atoms").size() == 4);

  // A sum within rounding distance of the boundary draws a warning.
  const CommandResult near = run_cli("phase --alpha 0.5 --beta 1.4999999999");
  CHECK(near.exit_code == 0);
  CHECK(near.err.find("warning") != std::string::npos);
  CHECK(run_cli("phase --alpha 0.5 --beta 1.5").err.empty());
}

TEST_CASE("rate function grids") {
  const CommandResult csv = run_cli("ratefn --alpha 0.5 --beta 1.0 --grid 5");
  CHECK(csv.exit_code == 0);
  CHECK(csv.out.rfind("x1,x2,value\n", 0) == 0);
  CHECK(count_lines(csv.out) == 26);
  CHECK(csv.out.find("\n0,0,0\n") != std::string::npos);

  const CommandResult as_json =
      run_cli("ratefn --alpha 1.0 --beta 2.0 --grid 3 --which Jm --format json");
  const json payload = json::parse(as_json.out);
  check_schema("ratefn.schema.json", payload);
  CHECK(payload.at("values").size() == 9);
  CHECK(payload.at("which") == "Jm");

  CHECK(run_cli("ratefn --alpha 0.5 --beta 1.0 --grid 1").exit_code == 1);
  CHECK(run_cli("ratefn --alpha 0.5 --beta 1.0 --which K").exit_code == 1);
}

TEST_CASE("fixed point reports") {
  const CommandResult sub = run_cli("fixedpoints --alpha 0.5 --beta 1.0");
  CHECK(sub.exit_code == 0);
  const json sub_payload = json::parse(sub.out);
  check_schema("fixedpoints.schema.json", sub_payload);
  CHECK(sub_payload.at("solutions").size() == 1);
  CHECK(sub_payload.at("solutions")[0].at("definiteness") == "negative-definite");

  const json coupled = json::parse(run_cli("fixedpoints --alpha 1.0 --beta 2.0").out);
  CHECK(coupled.at("solutions").size() == 3);
}

TEST_CASE("sampler output is deterministic across threads and repeats") {
  const auto dir = std::filesystem::temp_directory_path();
  const auto csv_a = dir / "blockspin_samples_a.csv";
  const auto csv_b = dir / "blockspin_samples_b.csv";
  const auto meta_a = dir / "blockspin_samples_a.json";
  const auto meta_b = dir / "blockspin_samples_b.json";
  const std::string base =
      "--no-meta sample --alpha 0.5 --beta 1.0 -n 16 --sweeps 200 --burn-in 50"
      " --thin 3 --chains 3 --seed 99";
  CHECK(run_cli(base + " --threads 1 --out " + csv_a.string() + " --meta-out " +
                meta_a.string())
            .exit_code == 0);
  CHECK(run_cli(base + " --threads 4 --out " + csv_b.string() + " --meta-out " +
                meta_b.string())
            .exit_code == 0);
  const std::string first = slurp(csv_a);
  CHECK(first == slurp(csv_b));
  CHECK(first.rfind("sweep,m1,m2\n", 0) == 0);
  CHECK(count_lines(first) == 151);  // header + 50 records x 3 chains
  CHECK(slurp(meta_a) == slurp(meta_b));

  const json meta = json::parse(slurp(meta_a));
  check_schema("samples.schema.json", meta);
  CHECK(meta.at("records_per_chain").size() == 3);
  CHECK(!meta.contains("generated_at"));

  // The environment variable is an alias for --threads.
  CHECK(run_cli(base + " --out " + csv_b.string(), "BLOCKSPIN_THREADS=2").exit_code ==
        0);
  CHECK(first == slurp(csv_b));

  for (const auto& path : {csv_a, csv_b, meta_a, meta_b}) std::filesystem::remove(path);
}

TEST_CASE("verification subcommands and exit codes") {
  const CommandResult pass =
      run_cli("verify clt --alpha 0.5 --beta 1.0 --sizes 100,200");
  CHECK(pass.exit_code == 0);
  const json report = json::parse(pass.out);
  check_schema("report.schema.json", report);
  CHECK(report.at("verdict") == "pass");
  CHECK(report.at("sizes").size() == 2);

  const CommandResult wrong_regime =
      run_cli("verify clt --alpha 0.5 --beta 1.5 --sizes 100,200");
  CHECK(wrong_regime.exit_code == 1);
  CHECK(wrong_regime.err.find("critical") != std::string::npos);

  const CommandResult starved =
      run_cli("verify mcmc --alpha 0.5 --beta 1.0 -n 20 --sweeps 30 --seed 5");
  CHECK(starved.exit_code == 2);
  CHECK(json::parse(starved.out).at("verdict") == "fail");

  const CommandResult csv = run_cli(
      "verify clt --alpha 0.5 --beta 1.0 --sizes 100,200 --format csv");
  CHECK(csv.exit_code == 0);
  CHECK(csv.out.rfind("n,distance\n", 0) == 0);
  CHECK(count_lines(csv.out) == 3);
}
