#pragma once

// Argument parsing for the catalytic tool.

#include "CLI11.hpp"
#include "catalytic/cli.hpp"

#include <iostream>
#include <map>
#include <sstream>

namespace catalytic {

inline int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Catalytic machine simulator and compress-or-compute transformer"};
  app.require_subcommand(1);
  RunConfig cfg;

  auto add_common = [&](CLI::App* sub) {
    auto* machine = sub->add_option("--machine", cfg.machine_path, "machine description file");
    auto* corpus = sub->add_option("--corpus", cfg.corpus_name, "built-in machine name");
    machine->excludes(corpus);
    sub->add_option("--cat", cfg.cat_len, "catalytic length for corpus machines")->check(CLI::Range(1u, 64u));
    sub->add_option("--input", cfg.inputs, "input bits (repeatable; default: the machine's input set)");
    sub->add_option("--tau", cfg.tau, "hex | all | sample:N:seed");
    sub->add_option("--mode", cfg.mode, "mode override");
    sub->add_option("--set-B", cfg.block_bits, "counter block width B");
    sub->add_option("--set-S", cfg.bound, "tour bound S");
    sub->add_flag("--unsafe-small-s", cfg.unsafe_small_s, "allow S below 2^(W+3)");
    sub->add_option("--format", cfg.format, "text | dot | query")->check(CLI::IsMember({"text", "dot", "query"}));
    sub->add_option("--method", cfg.method, "auto | literal | cursor | indexed")
        ->check(CLI::IsMember({"auto", "literal", "cursor", "indexed"}));
    sub->add_flag("--trace", cfg.trace, "print the per-round trace");
  };
  const std::map<std::string, std::string> about{
      {"validate", "check a machine description"},
      {"run", "decide inputs by direct simulation"},
      {"transform", "decide inputs through the compress-or-compute driver"},
      {"verify", "compare direct and transformed verdicts and check restoration"},
      {"stats", "report accept and reject tour sizes per input and tape"},
      {"export-dot", "write the halting components in Graphviz form"}};
  for (const auto& name : command_names()) add_common(app.add_subcommand(name, about.at(name)));
  app.add_subcommand("corpus", "list built-in machines");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return exit_ok;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return exit_usage;
  }
  CLI::App* chosen = app.get_subcommands().front();
  if (chosen->get_name() == "corpus") {
    for (const auto& n : corpus_names()) {
      const auto e = corpus_entry(n, 4);
      out << n << " mode=" << to_string(e.spec.mode) << " inputs=" << e.inputs.size()
          << " valid=" << (e.valid ? "yes" : "no") << " : " << e.summary << "\n";
    }
    return exit_ok;
  }
  return run_command(chosen->get_name(), cfg, out, err);
}

}  // namespace catalytic
