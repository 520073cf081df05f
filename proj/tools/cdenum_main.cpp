// Command-line front end: query evaluation over bounded-degree structures
// with constant-delay enumeration. See README.md for the input formats.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "cdenum/cdenum.hpp"

namespace {

// Shared flags live on each subcommand so `cdenum enum --help` is complete.
struct Options {
  cdenum::RunConfig cfg;
  std::string query_file;
};

void add_query_flags(CLI::App* cmd, Options& opt) {
  cmd->add_option("--query", opt.cfg.query, "query text");
  cmd->add_option("--query-file", opt.query_file, "file holding the query text");
  cmd->add_option("--head", opt.cfg.head,
                  "output variable order (must name every free variable)");
}

void add_structure_flags(CLI::App* cmd, Options& opt) {
  cmd->add_option("--structure", opt.cfg.structure_path, "facts document")
      ->required();
  cmd->add_option("--degree", opt.cfg.degree,
                  "reject structures whose degree exceeds this bound");
}

void add_radius_flag(CLI::App* cmd, Options& opt) {
  cmd->add_option(
      "--radius", opt.cfg.radius,
      "override the derived locality radius (answers are exact only if the "
      "query is insensitive to anything beyond this distance)");
}

int resolve_query_file(Options& opt) {
  if (opt.query_file.empty()) return 0;
  if (!opt.cfg.query.empty()) {
    std::cerr << "error: --query and --query-file are mutually exclusive\n";
    return 1;
  }
  std::ifstream in(opt.query_file);
  if (!in) {
    std::cerr << "error: cannot open query file: " << opt.query_file << "\n";
    return 1;
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  opt.cfg.query = buf.str();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"first-order query evaluation with constant-delay enumeration"};
  app.require_subcommand(1);

  Options opt;

  CLI::App* index = app.add_subcommand(
      "index", "precompute and print the type index and evaluation plan");
  add_structure_flags(index, opt);
  add_query_flags(index, opt);
  add_radius_flag(index, opt);

  CLI::App* enumerate = app.add_subcommand(
      "enum", "enumerate all answers in lexicographic order");
  add_structure_flags(enumerate, opt);
  add_query_flags(enumerate, opt);
  add_radius_flag(enumerate, opt);
  enumerate->add_option("--limit", opt.cfg.limit, "print at most this many rows");
  enumerate->add_flag("--stats", opt.cfg.stats, "print delay statistics");
  enumerate->add_flag("--oracle-check", opt.cfg.oracle_check,
                      "re-derive all answers by direct evaluation and compare");

  CLI::App* check = app.add_subcommand(
      "check", "evaluate a sentence (no free variables) to true/false");
  add_structure_flags(check, opt);
  add_query_flags(check, opt);

  CLI::App* bench = app.add_subcommand(
      "bench", "time preprocessing and delay over generated structures");
  add_query_flags(bench, opt);
  add_radius_flag(bench, opt);
  bench->add_option("--family", opt.cfg.family,
                    "structure family: path, cycle, ladder, random");
  bench->add_option("--sizes", opt.cfg.sizes, "structure sizes to run");
  bench->add_option("--seed", opt.cfg.seed, "random family seed");
  bench->add_option("--degree", opt.cfg.degree, "random family degree cap");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return cdenum::kExitUsage;
  }

  if (int rc = resolve_query_file(opt); rc != 0) return rc;

  if (index->parsed()) opt.cfg.command = cdenum::Command::Index;
  if (enumerate->parsed()) opt.cfg.command = cdenum::Command::Enum;
  if (check->parsed()) opt.cfg.command = cdenum::Command::Check;
  if (bench->parsed()) opt.cfg.command = cdenum::Command::Bench;

  return cdenum::execute_command(opt.cfg, std::cout, std::cerr);
}
