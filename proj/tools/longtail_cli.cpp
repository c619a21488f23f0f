// Experiment front end: run suites from a JSON config, validate configs, and
// compare the final metrics of two suite directories.
//
//   longtail run bench.json --seeds 1,2,3 --mode none,fasa --out results
//   longtail validate bench.json
//   longtail compare results_a results_b

#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "longtail/experiment.hpp"

namespace {

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> parts;
  std::string item;
  std::stringstream stream(text);
  while (std::getline(stream, item, ','))
    if (!item.empty()) parts.push_back(item);
  return parts;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Long-tailed classification benchmark with adaptive "
               "feature augmentation and sampling"};
  app.require_subcommand(1);

  std::string config_path, out_override, seeds_override, modes_override;
  int jobs = 1;

  CLI::App* run = app.add_subcommand("run", "execute a suite of seeded runs");
  run->add_option("config", config_path, "JSON experiment config")->required();
  run->add_option("--seeds", seeds_override, "comma-separated seed override");
  run->add_option("--mode", modes_override, "comma-separated mode override");
  run->add_option("--out", out_override, "output directory override");
  run->add_option("--jobs", jobs, "parallel workers")->check(CLI::PositiveNumber);

  CLI::App* validate =
      app.add_subcommand("validate", "parse and validate a config");
  validate->add_option("config", config_path, "JSON experiment config")
      ->required();

  std::string dir_a, dir_b;
  std::string mode_a, mode_b;
  CLI::App* compare = app.add_subcommand(
      "compare", "final-metric deltas between two suite directories");
  compare->add_option("dir_a", dir_a, "reference suite directory")->required();
  compare->add_option("dir_b", dir_b, "candidate suite directory")->required();
  compare->add_option("--mode-a", mode_a, "mode to pick from dir_a");
  compare->add_option("--mode-b", mode_b, "mode to pick from dir_b");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      longtail::ExperimentConfig config =
          longtail::load_config_file(config_path);
      if (!seeds_override.empty()) {
        config.seeds.clear();
        for (const std::string& s : split_list(seeds_override))
          config.seeds.push_back(std::stoull(s));
        if (config.seeds.empty())
          throw longtail::ConfigError("--seeds: empty list");
      }
      if (!modes_override.empty()) {
        config.modes.clear();
        for (const std::string& m : split_list(modes_override))
          config.modes.push_back(longtail::mode_from_name(m));
      }
      const std::string out =
          out_override.empty() ? config.output_dir : out_override;
      config.output_dir = out;
      longtail::SuiteOptions options;
      options.jobs = jobs;
      options.log = &std::cout;
      longtail::run_suite(config, out, options);
      std::cout << "suite written to " << out << '\n';
      return 0;
    }
    if (validate->parsed()) {
      longtail::load_config_file(config_path);
      std::cout << "ok\n";
      return 0;
    }
    if (compare->parsed()) {
      const auto table = longtail::compare_suites(
          dir_a,
          mode_a.empty() ? std::nullopt : std::optional<std::string>(mode_a),
          dir_b,
          mode_b.empty() ? std::nullopt : std::optional<std::string>(mode_b));
      std::cout << longtail::comparison_to_csv(table);
      return 0;
    }
  } catch (const longtail::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
