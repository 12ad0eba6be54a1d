#include <CLI11.hpp>
#include <exception>
#include <iostream>

#include "hetbandit/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"hetbandit: bandit-guided training for typed graphs"};
  app.require_subcommand(1);

  hetbandit::CommandSpec spec;

  auto add_run_options = [&spec](CLI::App* cmd) {
    cmd->add_option("--data", spec.data_dir, "dataset directory")->required();
    cmd->add_option("--config", spec.config_path, "JSON config file");
    cmd->add_option("--out", spec.out_path, "output JSON path");
    cmd->add_option("--seeds", spec.seeds, "seed spec: 7 | 0..9 | 0,1,5");
    cmd->add_flag("--deterministic", spec.deterministic,
                  "zero timing fields for byte-stable records");
  };

  CLI::App* train = app.add_subcommand("train", "train the full model across seeds");
  add_run_options(train);

  CLI::App* ablate = app.add_subcommand("ablate", "train one named ablation variant across seeds");
  add_run_options(ablate);
  ablate->add_option("--variant", spec.variant, "variant name (see README)")->required();

  CLI::App* stability =
      app.add_subcommand("stability", "summarize policy stability from run-record files");
  stability->add_option("inputs", spec.inputs, "run-record JSON files")->required();
  stability->add_option("--out", spec.out_path, "output JSON path");

  CLI::App* synth = app.add_subcommand("synth", "generate the synthetic benchmark");
  synth->add_option("--data", spec.data_dir, "output dataset directory")->required();
  synth->add_option("--seed", spec.synth_seed, "generator seed");
  synth->add_option("--noise", spec.synth_noise, "label corruption probability");

  CLI::App* validate = app.add_subcommand("validate", "check a dataset directory");
  validate->add_option("--data", spec.data_dir, "dataset directory")->required();

  CLI11_PARSE(app, argc, argv);
  spec.command = app.get_subcommands().front()->get_name();

  try {
    return hetbandit::run_command(spec, std::cout);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
