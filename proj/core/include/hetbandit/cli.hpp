#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace hetbandit {

// "7" -> {7}; "0..3" -> {0,1,2,3}; "0,2,5" -> {0,2,5}
std::vector<std::uint64_t> parse_seed_spec(const std::string& spec);

struct CommandSpec {
  std::string command;  // train | ablate | stability | synth | validate
  std::string config_path;
  std::string data_dir;
  std::string out_path;
  std::string variant = "full";      // ablate only
  std::string seeds = "0";
  std::vector<std::string> inputs;   // stability only: run-record JSON files
  bool deterministic = false;
  // synth only
  std::uint64_t synth_seed = 0;
  double synth_noise = 0.1;
};

// Runs one CLI command, writing human-readable progress to `log` and any
// artifact (run record JSON, stability report, dataset) to out_path / data
// directory. Returns a process exit code.
int run_command(const CommandSpec& spec, std::ostream& log);

}  // namespace hetbandit
