#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "qinsure/cli.hpp"

int main(int argc, char** argv) {
  namespace qc = qinsure::cli;
  qc::RunConfig cfg;
  std::uint64_t shots = 0;
  std::string mode = "exact";

  CLI::App app{"qinsure: quantum insurance circuit experiments"};
  app.require_subcommand(1, 1);
  for (const auto& name : qc::commands()) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--scenario", cfg.scenario, "scenario or distribution JSON file");
    sub->add_option("--shots", shots, "sample this many shots instead of analytic evaluation")
        ->check(CLI::PositiveNumber);
    sub->add_option("--seed", cfg.seed, "RNG seed");
    sub->add_option("--m", cfg.m, "query qubits for amplitude estimation")->check(CLI::PositiveNumber);
    sub->add_option("--mode", mode, "encoder mode")->check(CLI::IsMember({"exact", "linear"}));
    sub->add_option("--c-approx", cfg.c_approx, "linear encoder scaling");
    sub->add_option("--format", cfg.format, "output format")->check(CLI::IsMember({"json", "csv"}));
    sub->add_option("--out", cfg.out, "output file (stdout if omitted)");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << qc::error_json("invalid_argument", e.what());
    return 2;
  }

  try {
    cfg.command = app.get_subcommands().front()->get_name();
    if (shots > 0) {
      cfg.shots = shots;
    }
    cfg.mode = qinsure::parse_mode(mode);
    const auto text = qc::run(cfg);
    if (cfg.out.empty()) {
      std::cout << text;
    } else {
      qc::write_atomically(cfg.out, text);
    }
  } catch (const qinsure::Error& e) {
    std::cerr << qc::error_json(std::string(qinsure::to_string(e.code())), e.what());
    return 2;
  } catch (const std::exception& e) {
    std::cerr << qc::error_json("internal", e.what());
    return 3;
  }
  return 0;
}
