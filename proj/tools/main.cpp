// Command-line front end: run experiment sweeps from scenario files (or
// built-ins), inspect small instances with the exhaustive max-gain search,
// and list the built-in scenarios.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rtsched/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"deadline-constrained wireless link scheduling simulator"};
  app.require_subcommand(1);

  std::string scenario_path;
  std::string out_path;
  int threads = 1;
  std::vector<std::string> overrides;
  auto* run_cmd = app.add_subcommand("run", "execute a scenario sweep and emit CSV");
  run_cmd->add_option("scenario", scenario_path, "scenario file or built-in name")->required();
  run_cmd->add_option("--out", out_path, "write CSV here instead of stdout");
  run_cmd->add_option("--threads", threads, "parallel runs")->check(CLI::PositiveNumber);
  run_cmd->add_option("--override", overrides, "key=value patches, dotted paths");

  std::string instance_path;
  auto* oracle_cmd = app.add_subcommand("oracle", "max-gain search on a small instance");
  oracle_cmd->add_option("instance", instance_path, "instance file")->required();

  app.add_subcommand("list", "list built-in scenarios");

  CLI11_PARSE(app, argc, argv);

  if (run_cmd->parsed()) {
    if (!out_path.empty()) {
      // Buffer the CSV so a failing run leaves no file behind.
      std::ostringstream csv;
      const int code = rtsched::cmd_run(scenario_path, overrides, csv, std::cerr, threads);
      if (code != 0) return code;
      std::ofstream out(out_path);
      if (!out) {
        std::cerr << "error: cannot open output file '" << out_path << "'\n";
        return 1;
      }
      out << csv.str();
      return out.good() ? 0 : 1;
    }
    return rtsched::cmd_run(scenario_path, overrides, std::cout, std::cerr, threads);
  }
  if (oracle_cmd->parsed()) return rtsched::cmd_oracle(instance_path, std::cout, std::cerr);
  return rtsched::cmd_list(std::cout);
}
