// slgraph command-line tool: spectra of indefinite Sturm-Liouville problems
// on metric graphs, with Krein-space verification reports.
//
//   slgraph spectrum    --input graph.json --out results/
//   slgraph krein       --input graph.json --out results/ --probes 100
//   slgraph bracket     --input graph.json --out results/ --tol-bracket 1e-2
//   slgraph asymptotics --input graph.json --out results/ --range 5:30
//   slgraph oracle      --input graph.json --out results/ --window -50:50
//   slgraph verify-all  --input graph.json --out results/
//
// Exit codes: 0 ok, 1 I/O, 2 validation, 3 positivity hypothesis violated,
// 4 gated invariant failed.

#include <CLI11.hpp>

#include <iostream>
#include <string>

#include "slgraph/run.hpp"

namespace {

bool parse_pair(const std::string& text, double& lo, double& hi) {
  const auto pos = text.find(':');
  if (pos == std::string::npos) return false;
  try {
    lo = std::stod(text.substr(0, pos));
    hi = std::stod(text.substr(pos + 1));
  } catch (...) {
    return false;
  }
  return true;
}

bool parse_int_pair(const std::string& text, int& lo, int& hi) {
  const auto pos = text.find(':');
  if (pos == std::string::npos) return false;
  try {
    lo = std::stoi(text.substr(0, pos));
    hi = std::stoi(text.substr(pos + 1));
  } catch (...) {
    return false;
  }
  return true;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"indefinite Sturm-Liouville spectra on metric graphs"};
  app.require_subcommand(1);

  slg::RunConfig config;
  std::string window_text, range_text, nond_text = "form";

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--input,-i", config.input, "graph specification JSON")->required();
    cmd->add_option("--out,-o", config.out_dir, "output directory (fixed file names)");
    cmd->add_option("--mesh", config.mesh_override, "override every edge mesh count")
        ->check(CLI::Range(2, 1 << 20));
    return cmd;
  };

  auto* spectrum = add_common(app.add_subcommand("spectrum", "solve the pencil"));
  spectrum->add_flag("--dump-matrices", config.dump_matrices,
                     "also write form/signed_mass/unsigned_mass as i j value triples");

  auto* krein = add_common(app.add_subcommand("krein", "Krein-space verification report"));
  auto* bracket = add_common(
      app.add_subcommand("bracket", "Dirichlet / non-Dirichlet bracketing report"));
  auto* asym = add_common(app.add_subcommand("asymptotics", "Weyl-type asymptotic fit"));
  auto* oracle = add_common(
      app.add_subcommand("oracle", "secular-determinant root scan (ground truth)"));
  auto* verify = add_common(app.add_subcommand("verify-all", "run every verification suite"));

  for (CLI::App* cmd : {krein, verify}) {
    cmd->add_option("--truncation", config.truncation, "largest half-range Gram truncation")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--probes", config.probes, "random probe count")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--seed", config.seed, "probe RNG seed");
  }
  for (CLI::App* cmd : {oracle, verify}) {
    cmd->add_option("--window", window_text, "lambda window lo:hi (default -50:50)");
  }
  for (CLI::App* cmd : {bracket, verify}) {
    cmd->add_option("--tol-bracket", config.tol_bracket,
                    "relative bracketing tolerance (default: automatic)");
    cmd->add_option("--nond-sign", nond_text,
                    "non-Dirichlet decoupling convention: form|paper")
        ->check(CLI::IsMember({"form", "paper"}));
  }
  asym->add_option("--range", range_text, "fit range n_lo:n_hi (default 5:30)");

  CLI11_PARSE(app, argc, argv);

  if (spectrum->parsed()) config.command = slg::Command::Spectrum;
  if (krein->parsed()) config.command = slg::Command::Krein;
  if (bracket->parsed()) config.command = slg::Command::Bracket;
  if (asym->parsed()) config.command = slg::Command::Asymptotics;
  if (oracle->parsed()) config.command = slg::Command::Oracle;
  if (verify->parsed()) config.command = slg::Command::VerifyAll;

  if (!window_text.empty()) {
    if (!parse_pair(window_text, config.window_lo, config.window_hi)) {
      std::cerr << "{\"error\":\"validation\",\"message\":\"bad --window, expected lo:hi\"}\n";
      return slg::kExitValidation;
    }
    config.window_set = true;
  }
  if (!range_text.empty() && !parse_int_pair(range_text, config.fit_lo, config.fit_hi)) {
    std::cerr << "{\"error\":\"validation\",\"message\":\"bad --range, expected lo:hi\"}\n";
    return slg::kExitValidation;
  }
  config.nond_sign = nond_text == "paper" ? slg::NondSign::Paper : slg::NondSign::Form;

  return slg::run(config, std::cout, std::cerr);
}
