#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hardylab/runner.hpp"

namespace {

using Keys = std::vector<std::string>;

const Keys kCommon{"domain", "size", "h", "grading", "quad_order", "seed", "output"};

const std::map<std::string, Keys> kCommandKeys{
    {"hardy", {"levels", "constant", "eps"}},
    {"elliptic", {"task", "lambda", "lambda_list", "load", "eps_list"}},
    {"wave", {"lambda", "T", "dt"}},
    {"schrodinger", {"lambda", "T", "dt"}},
    {"hum", {"system", "task", "lambda", "T", "dt", "rho", "tol", "max_iter", "samples", "T_list"}},
    {"semilinear", {"lambda", "alpha"}},
    {"study", {"check", "h_list", "lambda", "lambda_list", "load", "T", "dt", "dt_ratio", "alpha", "constant", "eps"}},
};

const std::map<std::string, std::string> kDescriptions{
    {"hardy", "Hardy, improved Hardy and weighted constants under nested refinement"},
    {"elliptic", "Pohozaev identity, trace battery and lambda continuation for the linear problem"},
    {"wave", "Conservative wave run with multiplier and equipartition checks"},
    {"schrodinger", "Crank-Nicolson Schrodinger run with drift and multiplier checks"},
    {"hum", "Filtered HUM control, observability scan and Gramian checks"},
    {"semilinear", "Normalized minimization for the power nonlinearity"},
    {"study", "Convergence table of one check over an h list"},
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Boundary-singular Hardy operator toolkit"};
  app.set_help_flag("--help", "Print this help message and exit");
  app.require_subcommand(1);
  app.set_version_flag("--version", hardylab::kToolVersion);

  std::map<std::string, std::map<std::string, std::string>> values;
  for (const auto& [command, extra] : kCommandKeys) {
    CLI::App* sub = app.add_subcommand(command, kDescriptions.at(command));
    sub->set_help_flag("--help", "Print this help message and exit");
    Keys keys = kCommon;
    keys.insert(keys.end(), extra.begin(), extra.end());
    for (const auto& key : keys) sub->add_option("--" + key, values[command][key], key);
  }

  std::string file, output;
  CLI::App* run = app.add_subcommand("run", "Run a key = value config file");
  run->add_option("file", file, "config file")->required()->check(CLI::ExistingFile);
  run->add_option("--output", output, "override the output directory");

  CLI11_PARSE(app, argc, argv);

  if (run->parsed()) {
    std::ifstream in(file);
    std::stringstream text;
    text << in.rdbuf();
    return hardylab::run_text(text.str(), std::cout, output.empty() ? nullptr : &output);
  }
  for (const auto& [command, opts] : values) {
    if (!app.got_subcommand(command)) continue;
    std::ostringstream text;
    text << "command = " << command << '\n';
    for (const auto& [key, value] : opts) {
      if (app.get_subcommand(command)->count("--" + key)) text << key << " = " << value << '\n';
    }
    return hardylab::run_text(text.str(), std::cout);
  }
  return hardylab::exit_internal;
}
