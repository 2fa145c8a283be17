#pragma once

// JSON instance files, canonical serialization, and the analyze/solve/graph/certify pipelines
// shared by the command-line tool and the Python module.

#include <cstdint>
#include <optional>
#include <string>

#include "json.hpp"

#include "mhspectral/graph.hpp"
#include "mhspectral/solver.hpp"

namespace mhs {

using json = nlohmann::json;

/// Malformed instance file; `what()` starts with the JSON pointer of the offending value.
class ParseError : public Error {
 public:
  ParseError(const std::string& pointer, const std::string& message)
      : Error((pointer.empty() ? std::string("/") : pointer) + ": " + message), pointer_(pointer) {}
  const std::string& pointer() const { return pointer_; }

 private:
  std::string pointer_;
};

struct InitialVector {
  enum class Kind { uniform, random, given } kind = Kind::uniform;
  std::vector<std::vector<double>> blocks;
};

struct Instance {
  std::string name;
  MapInstance map;
  NormSpec norms;
  SolverConfig solver;
  bool continuation = false;
  std::uint64_t seed = 0;
  InitialVector x0;
  json canonical;
};

Instance parse_instance(const json& doc);
/// Parses text; syntax errors are reported with their byte offset.
json parse_json_text(const std::string& text);
Instance parse_instance_text(const std::string& text);

/// Canonical form: every default filled in, fixed key order, shortest round-trip numbers.
std::string serialize_instance(const Instance& inst);

/// x0 per the instance ("random" draws uniformly on (0.5, 1.5) from `seed`), normalized.
ProductVector initial_vector(const Instance& inst, std::uint64_t seed);

json to_json(const ProductVector& x);
json to_json(const Certificate& c);
json to_json(const SolveReport& r);

struct CommandOptions {
  bool dual = false;
  std::optional<std::uint64_t> seed;
  std::optional<json> prior_report;  ///< certify: a solve report to certify instead of re-solving
};

struct CommandResult {
  json report;
  int exit_code = 0;
  std::string summary;  ///< human-readable
};

/// Exit code of a solve status: 0 converged / cycling, 3 max_iter, 4 diverged.
int exit_code_for(SolveStatus s);

/// Runs analyze, solve, graph or certify. Hypothesis failures (for example no admissible
/// weights) yield exit code 2 with the reason in the report.
CommandResult run_command(const std::string& command, const Instance& inst,
                          const CommandOptions& opts = {});

}  // namespace mhs
