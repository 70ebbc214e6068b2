#include <CLI11.hpp>
#include <iostream>

#include "mms/experiment.hpp"

namespace {

struct CommonFlags {
  std::string config_path;
  std::string out;
  std::string seed;
  std::string levels;
  std::string c;
  std::string k;
};

void add_common(CLI::App* sub, CommonFlags& flags) {
  sub->add_option("config", flags.config_path, "experiment config file (JSON)")
      ->required()
      ->check(CLI::ExistingFile);
  sub->add_option("--out", flags.out, "output directory (overrides the config)");
  sub->add_option("--seed", flags.seed, "random seed (overrides the config)");
  sub->add_option("--levels", flags.levels, "hierarchy levels (overrides the config)");
  sub->add_option("--c", flags.c, "measure budget (overrides the config)");
  sub->add_option("--k", flags.k, "eigenvalue count (overrides the config)");
}

int run(const std::string& task, const CommonFlags& flags) {
  std::map<std::string, std::string> overrides;
  if (!flags.out.empty()) overrides["out"] = flags.out;
  if (!flags.seed.empty()) overrides["seed"] = flags.seed;
  if (!flags.levels.empty()) overrides["levels"] = flags.levels;
  if (!flags.c.empty()) overrides["c"] = flags.c;
  if (!flags.k.empty()) overrides["k"] = flags.k;

  try {
    std::ifstream in(flags.config_path);
    std::stringstream ss;
    ss << in.rdbuf();
    std::string text = ss.str();
    // the subcommand pins the task; a conflicting config task is an error
    mms::json cfg = mms::json::parse(text, nullptr, true);
    if (cfg.contains("task") && cfg.at("task").get<std::string>() != task) {
      std::cerr << "config task \"" << cfg.at("task").get<std::string>()
                << "\" does not match subcommand \"" << task << "\"\n";
      return 2;
    }
    cfg["task"] = task;
    const mms::ExperimentOutcome outcome = mms::run_experiment(cfg.dump(), overrides);
    std::cout << "wrote " << (outcome.out_dir / "result.json").string() << "\n";
    return 0;
  } catch (const mms::config_error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const mms::resource_error& e) {
    std::cerr << "resource limit: " << e.what() << "\n";
    return 3;
  } catch (const mms::json::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"shape optimization toolkit on finite metric measure spaces"};
  app.require_subcommand(1);

  const std::vector<std::string> tasks = {"audit",    "solve",    "spectrum",    "energy",
                                          "capacity", "optimize", "gamma-study", "perforated"};
  std::map<std::string, CommonFlags> flags;
  for (const std::string& t : tasks) {
    CLI::App* sub = app.add_subcommand(t, "run the " + t + " task");
    add_common(sub, flags[t]);
  }

  CLI11_PARSE(app, argc, argv);
  for (const std::string& t : tasks)
    if (app.got_subcommand(t)) return run(t, flags[t]);
  return 1;
}
