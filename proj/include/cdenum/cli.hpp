#pragma once

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "cdenum/common.hpp"
#include "cdenum/decomposition.hpp"
#include "cdenum/enumeration.hpp"
#include "cdenum/evaluator.hpp"
#include "cdenum/formula.hpp"
#include "cdenum/generators.hpp"
#include "cdenum/parser.hpp"
#include "cdenum/structure.hpp"

namespace cdenum {

// Command-level misuse (wrong command for the query shape, bad head
// override, missing inputs): exits with the usage code rather than the
// precondition code.
class UsageError : public Error {
 public:
  explicit UsageError(const std::string& what) : Error(what) {}
};

enum class Command { Index, Enum, Check, Bench };

struct RunConfig {
  Command command = Command::Check;
  std::string structure_path;             // facts document (not used by bench)
  std::string query;                      // query text
  std::optional<std::uint32_t> degree;    // enforce a Gaifman degree bound
  std::optional<std::uint64_t> radius;    // override the derived radius
  std::vector<std::string> head;          // reorder/select output variables
  std::optional<std::uint64_t> limit;     // stop printing after this many rows
  bool stats = false;                     // print delay statistics
  bool oracle_check = false;              // cross-check against direct evaluation
  std::uint64_t seed = 42;                // bench: random family seed
  std::string family = "path";            // bench: structure family
  std::vector<std::uint64_t> sizes = {100, 1000, 10000};  // bench sizes
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitPrecondition = 2;
inline constexpr int kExitMismatch = 3;

namespace detail {

inline Structure load_structure_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open structure file: " + path);
  return load_structure(in);
}

inline Formula parse_query(const Signature& sig, const RunConfig& cfg) {
  if (cfg.query.empty()) throw UsageError("no query given");
  Formula f = parse_formula(cfg.query, sig);
  if (!cfg.head.empty()) {
    try {
      f = f.with_head(cfg.head);
    } catch (const ConfigError& e) {
      throw UsageError(e.what());
    }
  }
  return f;
}

inline void enforce_degree(const GaifmanGraph& g, std::optional<std::uint32_t> d) {
  if (d.has_value() && g.max_degree() > *d) {
    throw ConfigError("structure degree " + std::to_string(g.max_degree()) +
                      " exceeds the declared bound " + std::to_string(*d));
  }
}

inline std::string answer_line(const Structure& s, const Tuple& t) {
  std::string line;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (i) line += '\t';
    line += s.name(t[i]);
  }
  return line;
}

inline void print_delay_stats(std::ostream& out, const DelayStats& d) {
  std::ostringstream mean;
  mean << std::fixed << std::setprecision(2) << d.mean_delay_steps;
  out << "stats: emitted=" << d.emitted << " maxDelaySteps=" << d.max_delay_steps
      << " meanDelaySteps=" << mean.str()
      << " preprocessSteps=" << d.preprocess_steps << "\n";
}

inline int run_check(const Structure& s, const Formula& f, const RunConfig& cfg,
                     std::ostream& out) {
  if (f.arity() != 0) {
    throw UsageError("check needs a sentence; use enum for open queries");
  }
  GaifmanGraph g = GaifmanGraph::build(s);
  enforce_degree(g, cfg.degree);
  Assignment asg(f.var_count());
  out << (evaluate(s, f, asg) ? "true" : "false") << "\n";
  return kExitOk;
}

inline int run_index(const Structure& s, const Formula& f, const RunConfig& cfg,
                     std::ostream& out) {
  if (f.arity() < 1) {
    throw UsageError("index needs an open query; use check for sentences");
  }
  GaifmanGraph g = GaifmanGraph::build(s);
  enforce_degree(g, cfg.degree);
  Prepared prep = prepare(f, s, cfg.radius);
  out << prep.types.dump(s);
  out << dump_plan(prep.plan);
  out << "precompute: gaifman=" << prep.plan.stats.gaifman_steps
      << " distance=" << prep.plan.stats.distance_steps
      << " type=" << prep.plan.stats.type_steps
      << " relevance=" << prep.plan.stats.relevance_steps
      << " total=" << prep.plan.stats.total() << "\n";
  return kExitOk;
}

inline int run_enum(const Structure& s, const Formula& f, const RunConfig& cfg,
                    std::ostream& out, std::ostream& err) {
  if (f.arity() < 1) {
    throw UsageError("enum needs an open query; use check for sentences");
  }
  GaifmanGraph g = GaifmanGraph::build(s);
  enforce_degree(g, cfg.degree);
  Prepared prep = prepare(f, s, cfg.radius);
  EnumerationCursor cursor = open_cursor(prep);

  std::vector<Tuple> emitted;  // kept only under --oracle-check
  std::uint64_t printed = 0;
  while (auto t = cursor.next()) {
    if (!cfg.limit.has_value() || printed < *cfg.limit) {
      out << answer_line(s, *t) << "\n";
      ++printed;
    } else if (!cfg.oracle_check) {
      break;
    }
    if (cfg.oracle_check) emitted.push_back(std::move(*t));
  }
  if (cfg.stats) print_delay_stats(out, cursor.delay_stats());
  if (cfg.oracle_check) {
    std::vector<Tuple> expected = brute_enumerate(s, f);
    if (emitted != expected) {
      err << "oracle mismatch: enumerated " << emitted.size() << " tuples, direct "
          << "evaluation found " << expected.size() << "\n";
      std::size_t upto = std::min(emitted.size(), expected.size());
      for (std::size_t i = 0; i < upto; ++i) {
        if (emitted[i] != expected[i]) {
          err << "first divergence at row " << i << ": got "
              << answer_line(s, emitted[i]) << ", want "
              << answer_line(s, expected[i]) << "\n";
          break;
        }
      }
      return kExitMismatch;
    }
    out << "oracle: match (" << expected.size() << " tuples)\n";
  }
  return kExitOk;
}

inline int run_bench(const RunConfig& cfg, std::ostream& out) {
  if (cfg.query.empty()) throw UsageError("bench needs a query");
  if (cfg.sizes.empty()) throw UsageError("bench needs at least one size");
  for (std::uint64_t n : cfg.sizes) {
    Structure s = make_family(cfg.family, n, cfg.seed,
                              cfg.degree.value_or(3));
    Formula f = parse_query(s.sig(), cfg);
    if (f.arity() < 1) throw UsageError("bench needs an open query");
    GaifmanGraph g = GaifmanGraph::build(s);
    enforce_degree(g, cfg.degree);
    Prepared prep = prepare(f, s, cfg.radius);
    EnumerationCursor cursor = open_cursor(prep);
    while (cursor.next().has_value()) {
    }
    DelayStats d = cursor.delay_stats();
    std::ostringstream mean;
    mean << std::fixed << std::setprecision(2) << d.mean_delay_steps;
    out << "n=" << n << " family=" << cfg.family
        << " preprocessSteps=" << d.preprocess_steps << " emitted=" << d.emitted
        << " maxDelaySteps=" << d.max_delay_steps
        << " meanDelaySteps=" << mean.str() << "\n";
  }
  return kExitOk;
}

}  // namespace detail

/**
 * Run one command against the given output/error sinks. Returns the
 * process exit code: 0 success, 1 usage or parse failure, 2 precondition
 * violation (degree bound, radius limits), 3 enumeration/oracle mismatch.
 */
inline int execute_command(const RunConfig& cfg, std::ostream& out,
                           std::ostream& err) {
  try {
    if (cfg.command == Command::Bench) return detail::run_bench(cfg, out);
    Structure s = detail::load_structure_file(cfg.structure_path);
    Formula f = detail::parse_query(s.sig(), cfg);
    switch (cfg.command) {
      case Command::Check:
        return detail::run_check(s, f, cfg, out);
      case Command::Index:
        return detail::run_index(s, f, cfg, out);
      case Command::Enum:
        return detail::run_enum(s, f, cfg, out, err);
      default:
        throw InvariantError("unhandled command");
    }
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const InputError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kExitPrecondition;
  } catch (const InvariantError& e) {
    err << "internal error: " << e.what() << "\n";
    return kExitUsage;
  }
}

}  // namespace cdenum
