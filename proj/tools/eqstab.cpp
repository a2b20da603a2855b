// eqstab: run correction scenarios and write trace.csv / report.json.

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "eqstab/scenario.hpp"

namespace fs = std::filesystem;
using namespace eqstab;

namespace {

struct CommonFlags {
  std::string scenario_file;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<int> trials;
  std::optional<double> tolerance;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--scenario", f.scenario_file, "Scenario JSON file")->check(CLI::ExistingFile);
  cmd->add_option("--out", f.out, "Output directory (default: $EQSTAB_OUT or ./eqstab_out)");
  cmd->add_option("--seed", f.seed, "RNG seed");
  cmd->add_option("--trials", f.trials, "Number of trials")->check(CLI::PositiveNumber);
  cmd->add_option("--tolerance", f.tolerance, "Convergence tolerance")->check(CLI::PositiveNumber);
}

fs::path output_dir(const CommonFlags& f) {
  if (!f.out.empty()) return f.out;
  if (const char* env = std::getenv("EQSTAB_OUT"); env && *env) return env;
  return "eqstab_out";
}

Scenario load(const CommonFlags& f, ScenarioKind kind) {
  Scenario s = default_scenario(kind);
  if (!f.scenario_file.empty()) {
    std::ifstream in(f.scenario_file);
    json j;
    try {
      j = json::parse(in);
    } catch (const json::parse_error& e) {
      throw ScenarioError("", std::string("invalid JSON: ") + e.what());
    }
    s = parse_scenario(j);
    const bool compatible = s.kind == kind || (kind == ScenarioKind::rokhlin && s.kind == ScenarioKind::tracial);
    if (!compatible) {
      throw ScenarioError("/kind", std::string("scenario kind '") + kind_name(s.kind) +
                                       "' does not match the subcommand (expected '" + kind_name(kind) + "')");
    }
  }
  if (f.seed) s.seed = *f.seed;
  if (f.trials) s.trials = *f.trials;
  if (f.tolerance) s.tolerance = *f.tolerance;
  return s;
}

int report(const std::string& name, const ScenarioResult& r, const fs::path& dir) {
  write_outputs(r, dir);
  const auto fails = r.failures();
  std::cout << name << ": " << r.trials.size() << " trials, " << (r.pass() ? "PASS" : "FAIL") << " ("
            << static_cast<long>(r.wall_ms) << " ms) -> " << dir.string() << "\n";
  for (const auto& f : fails) std::cerr << name << ": " << f << "\n";
  return r.pass() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Correct approximate equivariant structures to exact ones and check the bounds."};
  app.require_subcommand(1);

  struct Sub {
    const char* name;
    const char* help;
    ScenarioKind kind;
  };
  const Sub subs[] = {
      {"stabilize", "Approximate representations", ScenarioKind::rep},
      {"cocycle", "Approximate coboundaries of exact cocycles", ScenarioKind::cocycle},
      {"lift", "Equivariant lifting through a tower", ScenarioKind::lift},
      {"rokhlin", "Exact Rokhlin towers for cyclic groups", ScenarioKind::rokhlin},
      {"graded", "Graded representations of abelian groups", ScenarioKind::graded},
      {"estimate", "Averaged-logarithm integral estimate", ScenarioKind::integral_estimate},
  };
  CommonFlags flags;
  bool tracial = false;
  std::vector<std::pair<CLI::App*, ScenarioKind>> cmds;
  for (const auto& s : subs) {
    CLI::App* cmd = app.add_subcommand(s.name, s.help);
    add_common(cmd, flags);
    if (s.kind == ScenarioKind::rokhlin) cmd->add_flag("--tracial", tracial, "Run the tracial variant");
    cmds.emplace_back(cmd, s.kind);
  }
  CLI::App* suite = app.add_subcommand("suite", "Run every scenario kind with built-in settings");
  std::uint64_t suite_seed = 1;
  std::string suite_out;
  suite->add_option("--out", suite_out, "Output directory (default: $EQSTAB_OUT or ./eqstab_out)");
  suite->add_option("--seed", suite_seed, "RNG seed");

  CLI11_PARSE(app, argc, argv);

  try {
    if (suite->parsed()) {
      CommonFlags f;
      f.out = suite_out;
      const fs::path root = output_dir(f);
      int status = 0;
      for (const auto& [name, scenario] : suite_scenarios(suite_seed)) {
        status |= report(name, run_scenario(scenario), root / name);
      }
      std::cout << "suite: " << (status == 0 ? "PASS" : "FAIL") << "\n";
      return status;
    }
    for (const auto& [cmd, kind] : cmds) {
      if (!cmd->parsed()) continue;
      ScenarioKind k = kind;
      if (k == ScenarioKind::rokhlin && tracial) k = ScenarioKind::tracial;
      return report(cmd->get_name(), run_scenario(load(flags, k)), output_dir(flags));
    }
  } catch (const ScenarioError& e) {
    std::cerr << "scenario error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
