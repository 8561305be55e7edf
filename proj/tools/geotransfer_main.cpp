#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"

#include "geotransfer/scenario.hpp"

using namespace geotransfer;

namespace {

void apply_overrides(Scenario& s, const std::optional<std::uint64_t>& seed,
                     const std::optional<double>& tolerance) {
  if (seed) s.seed = *seed;
  if (tolerance) s.tolerance = *tolerance;
}

int run_file(const std::string& path, const std::string& out_dir,
             const std::optional<std::uint64_t>& seed,
             const std::optional<double>& tolerance) {
  std::ifstream in(path, std::ios::binary);
  if (!in.good()) {
    std::cerr << "error: cannot read scenario file: " << path << "\n";
    return 2;
  }
  std::ostringstream raw;
  raw << in.rdbuf();
  Scenario s = parse_scenario(raw.str(), path);
  apply_overrides(s, seed, tolerance);
  return run_scenario(s, out_dir, std::cout);
}

int run_fixtures(const std::string& out_dir, const std::optional<std::uint64_t>& seed,
                 const std::optional<double>& tolerance) {
  Scenario s = builtin_fixtures();
  apply_overrides(s, seed, tolerance);
  std::filesystem::create_directories(out_dir);
  {
    std::ofstream out(std::filesystem::path(out_dir) / "scenario.json", std::ios::binary);
    out << scenario_to_json(s).dump(2) << "\n";
  }
  return run_scenario(s, out_dir, std::cout);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"geometric transfer rules: allocation, family classification, and rule diagnostics"};
  app.require_subcommand(1);
  app.fallthrough();

  std::optional<std::uint64_t> seed;
  std::optional<double> tolerance;
  app.add_option("--seed", seed, "override the scenario seed");
  app.add_option("--tolerance", tolerance, "override the comparison tolerance")
      ->check(CLI::PositiveNumber);

  std::string scenario_path;
  std::string run_out;
  CLI::App* run = app.add_subcommand("run", "execute a scenario file and write its reports");
  run->add_option("scenario", scenario_path, "path to a scenario JSON file")->required();
  run->add_option("--out", run_out, "directory that receives the reports")->required();

  std::string fixtures_out;
  CLI::App* fixtures =
      app.add_subcommand("fixtures", "write the built-in scenario and execute it");
  fixtures->add_option("--out", fixtures_out, "directory for scenario.json and its reports")
      ->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return run_file(scenario_path, run_out, seed, tolerance);
    return run_fixtures(fixtures_out, seed, tolerance);
  } catch (const ScenarioError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
