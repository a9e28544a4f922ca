// Copyright 2026 The sarkit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Command-line entry point for the synergy pipeline. One subcommand per
// invocation drives one stage: `play` logs actuator activity, `fit-sar`
// extracts the representation, `train` runs the comparison conditions,
// `eval`/`transfer`/`ablate` probe the trained artifacts, and `export`
// renders tables and plots from the recorded metrics.
//
// Exit codes: 0 on success; 2 for usage problems (unknown flag or
// subcommand, bad value for a constrained argument); 3 when the config file
// or a --set override cannot be loaded; 1 when execution itself fails.
// Every failure prints a single machine-parsable line to stderr:
//   sarkit: <kind>: <message>

#include <cstdint>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "nlohmann/json.hpp"
#include "sarkit/error.hpp"
#include "sarkit/harness/commands.hpp"
#include "sarkit/harness/experiment.hpp"
#include "sarkit/harness/pipeline.hpp"
#include "sarkit/json_io.hpp"
#include "sarkit/synergy.hpp"

namespace {

using sarkit::Error;
using sarkit::ErrorKind;
namespace harness = sarkit::harness;

struct CliOptions {
  std::string config_path;
  std::string out_dir = "results";
  std::vector<std::string> overrides;
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> workers;

  std::vector<std::string> conditions;  // train / eval
  std::vector<std::string> terrains;    // transfer
  std::string ablation;                 // ablate
  std::string metrics_dir;              // export
  std::string log_path;                 // fit-sar direct mode
  std::string sar_out;                  // fit-sar direct mode
  std::uint64_t n_syn = 0;              // fit-sar direct mode
};

void report(const Error& error) {
  std::cerr << "sarkit: " << sarkit::error_kind_name(error.kind()) << ": "
            << error.what() << '\n';
}

// Applies one `dotted.path=value` assignment onto the config document. The
// value text is parsed as JSON when it is valid JSON (numbers, booleans,
// arrays, quoted strings) and kept as a plain string otherwise, so
// `--set train_env.name=reorient` needs no quoting.
void apply_override(nlohmann::json& doc, const std::string& assignment) {
  const std::size_t eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) {
    sarkit::throw_error(ErrorKind::kConfiguration,
                        "override '" + assignment +
                            "' is not of the form key=value");
  }
  const std::string path = assignment.substr(0, eq);
  const std::string text = assignment.substr(eq + 1);
  nlohmann::json value = nlohmann::json::parse(text, nullptr,
                                               /*allow_exceptions=*/false);
  if (value.is_discarded()) value = text;

  nlohmann::json* node = &doc;
  std::size_t at = 0;
  while (true) {
    const std::size_t dot = path.find('.', at);
    const std::string key =
        dot == std::string::npos ? path.substr(at) : path.substr(at, dot - at);
    if (key.empty()) {
      sarkit::throw_error(ErrorKind::kConfiguration,
                          "override key '" + path + "' has an empty segment");
    }
    if (!node->is_object()) {
      sarkit::throw_error(ErrorKind::kConfiguration,
                          "override key '" + path +
                              "' descends into a non-object value");
    }
    if (dot == std::string::npos) {
      (*node)[key] = value;
      return;
    }
    node = &(*node)[key];
    at = dot + 1;
  }
}

// Builds the effective experiment config: built-in defaults, then the
// config file, then --set overrides, then the global --seed/--workers flags.
harness::ExperimentConfig load_config(const CliOptions& cli) {
  nlohmann::json doc = cli.config_path.empty()
                           ? nlohmann::json::object()
                           : sarkit::load_json_file(cli.config_path);
  if (!doc.is_object()) {
    sarkit::throw_error(ErrorKind::kConfiguration,
                        "config file must hold a JSON object: " +
                            cli.config_path);
  }
  for (const std::string& assignment : cli.overrides) {
    apply_override(doc, assignment);
  }
  harness::ExperimentConfig config = harness::experiment_from_json(doc);
  if (cli.seed) config.seeds = {*cli.seed};
  if (cli.workers) config.workers = static_cast<std::size_t>(*cli.workers);
  config.validate();
  return config;
}

std::vector<harness::Condition> parse_conditions(
    const std::vector<std::string>& names) {
  if (names.empty()) return harness::all_conditions();
  std::vector<harness::Condition> out;
  for (const std::string& name : names) {
    if (name == "all") return harness::all_conditions();
    out.push_back(harness::condition_from_string(name));
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CliOptions cli;
  if (const char* env = std::getenv("SAR_RESULTS_DIR"); env != nullptr && *env) {
    cli.out_dir = env;
  }

  CLI::App app{
      "sarkit: synergistic action representations for overactuated control"};
  app.fallthrough();  // global flags may follow the subcommand
  app.require_subcommand(1);
  app.add_option("--config", cli.config_path, "Experiment config JSON file");
  app.add_option("--out-dir", cli.out_dir,
                 "Artifact directory (env SAR_RESULTS_DIR overrides the "
                 "built-in default)")
      ->capture_default_str();
  app.add_option("--seed", cli.seed,
                 "Run a single seed instead of the configured seed list");
  app.add_option("--workers", cli.workers,
                 "Worker threads for per-seed jobs (default from config: 1)");
  app.add_option("--set", cli.overrides,
                 "Config override as dotted.path=value (repeatable; applied "
                 "after the config file)");

  CLI::App* play =
      app.add_subcommand("play", "Task-free play phase: train an exploration "
                                 "policy and record activation logs");
  CLI::App* fit = app.add_subcommand(
      "fit-sar", "Extract a synergy representation from activation logs");
  fit->add_option("--log", cli.log_path,
                  "Fit from one activation log CSV instead of the config's "
                  "per-seed logs");
  fit->add_option("--n-syn", cli.n_syn,
                  "Synergy count (0 picks half the actuator count)")
      ->capture_default_str();
  fit->add_option("--out", cli.sar_out,
                  "Representation output file (required with --log)");
  CLI::App* train = app.add_subcommand(
      "train", "Train the comparison conditions on the target task");
  train->add_option("--condition", cli.conditions,
                    "sar-rl, rl-curr, rl-e2e, or all (repeatable; default all)");
  CLI::App* eval = app.add_subcommand(
      "eval", "Zero-shot evaluation of trained policies on the eval sets");
  eval->add_option("--condition", cli.conditions,
                   "sar-rl, rl-curr, rl-e2e, or all (repeatable; default all)");
  CLI::App* transfer = app.add_subcommand(
      "transfer", "Reuse fitted representations on new terrains against "
                  "from-scratch baselines");
  transfer->add_option("--terrain", cli.terrains,
                       "Terrain names (repeatable; default: hilly stairs "
                       "uneven slope)");
  CLI::App* ablate = app.add_subcommand("ablate", "Run one ablation study");
  ablate
      ->add_option("--kind", cli.ablation,
                   "blend-weight, synergy-subset, random-sar, or "
                   "post-hoc-blend")
      ->required();
  CLI::App* exporter = app.add_subcommand(
      "export", "Aggregate recorded metrics into tables and plots");
  exporter->add_option("--in", cli.metrics_dir,
                       "Metrics directory (default <out-dir>/metrics)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);  // prints the parse error and a --help pointer
    return 2;
  }

  const bool direct_fit = fit->parsed() && !cli.log_path.empty();

  // Interpret constrained argument values before doing any work.
  std::vector<harness::Condition> conditions;
  harness::AblationKind ablation_kind{};
  try {
    if (train->parsed() || eval->parsed()) {
      conditions = parse_conditions(cli.conditions);
    }
    if (ablate->parsed()) {
      ablation_kind = harness::ablation_kind_from_string(cli.ablation);
    }
    if (direct_fit && cli.sar_out.empty()) {
      sarkit::throw_error(ErrorKind::kArgument,
                          "fit-sar --log requires --out <file>");
    }
  } catch (const Error& e) {
    report(e);
    std::cerr << "Run with --help for usage.\n";
    return 2;
  }

  // Assemble the effective config for the subcommands that consume one.
  harness::ExperimentConfig config;
  if (!exporter->parsed() && !direct_fit) {
    try {
      config = load_config(cli);
    } catch (const Error& e) {
      report(e);
      return 3;
    }
  }

  const harness::ArtifactPaths paths(cli.out_dir);
  try {
    if (play->parsed()) {
      harness::cmd_play(config, paths);
    } else if (fit->parsed()) {
      if (direct_fit) {
        const sarkit::SynergyRepresentation sar = harness::fit_from_log_file(
            cli.log_path, static_cast<std::size_t>(cli.n_syn),
            cli.seed.value_or(1));
        sarkit::save_sar(cli.sar_out, sar);
      } else {
        harness::cmd_fit(config, paths);
      }
    } else if (train->parsed()) {
      harness::cmd_train(config, conditions, paths);
    } else if (eval->parsed()) {
      harness::cmd_eval(config, conditions, paths);
    } else if (transfer->parsed()) {
      const std::vector<std::string> terrains =
          cli.terrains.empty()
              ? std::vector<std::string>{"hilly", "stairs", "uneven", "slope"}
              : cli.terrains;
      harness::cmd_transfer(config, terrains, paths);
    } else if (ablate->parsed()) {
      harness::cmd_ablate(config, ablation_kind, paths);
    } else if (exporter->parsed()) {
      const std::string metrics =
          cli.metrics_dir.empty() ? paths.metrics_dir() : cli.metrics_dir;
      harness::cmd_export(metrics, paths);
    }
    return 0;
  } catch (const Error& e) {
    report(e);
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "sarkit: internal: " << e.what() << '\n';
    return 1;
  }
}
