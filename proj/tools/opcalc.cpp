#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "opcalc/opcalc.h"

namespace {

constexpr int kExitParse = 2;
constexpr int kExitValidation = 3;

std::optional<std::string> slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct OwnedString {
  char* p = nullptr;
  ~OwnedString() { opc_string_free(p); }
};

int cmd_run(const std::string& config_path, const std::string& out_path, std::optional<double> tol,
            std::optional<std::uint64_t> seed, bool table, bool timings) {
  const auto text = slurp(config_path);
  if (!text) {
    std::cerr << "opcalc: cannot read " << config_path << "\n";
    return kExitParse;
  }
  opc_run_options opts{seed.has_value(), seed.value_or(0), tol.has_value(), tol.value_or(0.0), timings};
  OwnedString report;
  int exit_code = 0;
  if (opc_run_json(text->c_str(), &opts, &report.p, &exit_code) != OPC_OK) {
    std::cerr << "opcalc: " << opc_last_error() << "\n";
    return 1;
  }
  if (!out_path.empty()) {
    std::ofstream out(out_path, std::ios::binary);
    if (!out) {
      std::cerr << "opcalc: cannot write " << out_path << "\n";
      return 1;
    }
    out << report.p;
  }
  if (table) {
    OwnedString rendered;
    if (opc_render_table(report.p, &rendered.p) == OPC_OK) std::cout << rendered.p;
  } else if (out_path.empty()) {
    std::cout << report.p;
  }
  return exit_code;
}

int cmd_describe(const std::string& path, bool table) {
  const auto text = slurp(path);
  if (!text) {
    std::cerr << "opcalc: cannot read " << path << "\n";
    return kExitParse;
  }
  OwnedString out;
  const opc_status st = opc_describe_json(text->c_str(), &out.p);
  if (st == OPC_ERR_PARSE) {
    std::cerr << "opcalc: parse error: " << opc_last_error() << "\n";
    return kExitParse;
  }
  if (st != OPC_OK) {
    std::cerr << "opcalc: invalid backend: " << opc_last_error() << "\n";
    return kExitValidation;
  }
  if (!table) {
    std::cout << out.p;
    return 0;
  }
  // Plain key/value lines for the terminal.
  std::string s(out.p);
  for (const char* key : {"kind", "name", "hdim", "points", "total_mass", "exact", "b2_rank"}) {
    const std::string needle = std::string("\"") + key + "\": ";
    const auto at = s.find(needle);
    if (at == std::string::npos) continue;
    const auto end = s.find_first_of(",\n", at);
    std::printf("%-11s %s\n", key, s.substr(at + needle.size(), end - at - needle.size()).c_str());
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"opcalc: operator calculus over weighted point families"};
  app.require_subcommand(1);

  std::string config_path, out_path;
  std::optional<double> tol;
  std::optional<std::uint64_t> seed;
  bool table = false, timings = false;
  auto* run = app.add_subcommand("run", "Execute the tasks of an experiment config");
  run->add_option("config", config_path, "Experiment config (JSON)")->required();
  run->add_option("--out", out_path, "Write the JSON report here");
  run->add_option("--tol", tol, "Override the residual tolerance");
  run->add_option("--seed", seed, "Override the config seed");
  run->add_flag("--table", table, "Print a human-readable summary");
  run->add_flag("--timings", timings, "Record wall-clock seconds per task");

  std::string backend_path;
  bool describe_table = false;
  auto* describe = app.add_subcommand("describe", "Summarize a backend spec");
  describe->add_option("backend", backend_path, "Backend spec (JSON)")->required();
  describe->add_flag("--table", describe_table, "Print key/value lines instead of JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitParse;
  }
  if (*run) return cmd_run(config_path, out_path, tol, seed, table, timings);
  return cmd_describe(backend_path, describe_table);
}
