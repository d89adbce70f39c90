#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "evotherm/harness.hpp"

namespace {

std::vector<double> parse_values(const std::string& csv) {
  std::vector<double> out;
  std::stringstream ss(csv);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok.empty()) continue;
    std::size_t pos = 0;
    const double v = std::stod(tok, &pos);
    if (pos != tok.size())
      throw evotherm::ParseError("bad sweep value: " + tok);
    out.push_back(v);
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"evotherm: evolutionary thermoelasticity simulator"};
  app.require_subcommand(1);

  std::string scenario_path;
  std::string out_dir = "out";
  bool dry_run = false;

  CLI::App* run = app.add_subcommand("run", "solve a scenario and write results");
  run->add_option("scenario", scenario_path, "scenario JSON file")->required();
  run->add_option("--out", out_dir, "output directory");
  run->add_flag("--dry-run", dry_run, "assembly and certification only");

  std::string study_kind;
  std::string study_values;
  CLI::App* study = app.add_subcommand("study", "parameter study");
  study->add_option("kind", study_kind,
                    "alpha_limit|eps_limit|dt_refine|model_compare")
      ->required();
  study->add_option("scenario", scenario_path, "scenario JSON file")->required();
  study->add_option("--values", study_values, "comma-separated sweep values");
  study->add_option("--out", out_dir, "output directory");

  CLI::App* verify = app.add_subcommand("verify", "report only, no files");
  verify->add_option("scenario", scenario_path, "scenario JSON file")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    const evotherm::Scenario sc = evotherm::load_scenario(scenario_path);
    if (run->parsed()) return evotherm::run_scenario(sc, out_dir, dry_run);
    if (verify->parsed()) return evotherm::verify_scenario(sc);
    const evotherm::StudyResult result =
        evotherm::run_study(study_kind, sc, parse_values(study_values));
    std::cout << result.to_csv();
    if (study->count("--out")) {
      std::filesystem::create_directories(out_dir);
      std::ofstream f(std::filesystem::path(out_dir) / (study_kind + ".csv"),
                      std::ios::binary);
      f << result.to_csv();
    }
    if (result.monotone_warning)
      std::cerr << "warning: deviations are not monotone\n";
    return 0;
  } catch (const evotherm::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const evotherm::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const evotherm::Error& e) {
    std::cerr << "solver error: " << e.what() << "\n";
    return 3;
  }
}
