#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "geotransfer/serde.hpp"

namespace geotransfer {

enum class TaskKind {
  kAllocate,
  kClassify,
  kAxioms,
  kProbes,
  kVenn,
  kIndependence,
  kReconstruct,
};

const char* task_kind_name(TaskKind k);
std::optional<TaskKind> task_kind_from_name(const std::string& name);

struct TaskSpec {
  std::string name;
  TaskKind kind = TaskKind::kAllocate;
  std::string profile;                // allocate, axioms, reconstruct
  std::string stream;                 // allocate
  index_t window_lo = 0;              // allocate, reconstruct
  index_t window_hi = 0;
  std::vector<std::string> profiles;  // classify, probes, venn
  std::vector<std::string> axioms;    // axioms; empty means all
  std::optional<std::uint64_t> battery_seed;
  std::size_t battery_count = 200;
  index_t depth = 24;                 // probes
  Json expect;                        // per-kind expectation map; null = none
};

struct Scenario {
  std::uint64_t seed = 1;
  double tolerance = 1e-9;
  std::vector<std::pair<std::string, LambdaProfile>> profiles;
  std::vector<std::pair<std::string, Stream>> streams;
  std::vector<TaskSpec> tasks;
};

// Raised on malformed or unresolvable scenario input; the message starts
// with "<source>:<line>:".
struct ScenarioError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

Scenario parse_scenario(const std::string& raw, const std::string& source_name);
Json scenario_to_json(const Scenario& s);

// The shipped regression scenario: every named profile and stream fixture,
// with one task per report family and the expected outcomes wired in.
Scenario builtin_fixtures();

// Executes tasks in declaration order, writes <task>.json and <task>.csv
// into out_dir, logs one summary line per task. Returns 0 only when every
// task ran clean and every wired expectation matched.
int run_scenario(const Scenario& s, const std::string& out_dir, std::ostream& log);

}  // namespace geotransfer
