#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "geotransfer/rule_engine.hpp"

namespace geotransfer {

// Seeded battery of income streams: fixed fixtures first, then streams drawn
// reproducibly from the seed. Identical seeds yield identical streams.
struct Battery {
  std::uint64_t seed = 1;
  std::size_t count = 200;
  index_t max_window_len = 64;
  double max_value = 10.0;
  double max_ratio = 0.9;

  static std::vector<Stream> fixtures();
  std::vector<Stream> streams() const;
};

struct CheckConfig {
  double tolerance = 1e-9;
  bool parallel = true;
  // The folding pivots for the consistency check: edge pivots only (below
  // support, at support, one past the window) or every window index.
  bool full_consistency_sweep = false;
  index_t continuity_depth = 256;
};

enum class Outcome { kPass, kFail, kPreconditionUnmet };
const char* outcome_name(Outcome o);

// Everything needed to rerun one check case standalone.
struct CaseSpec {
  Stream r;
  std::optional<Stream> alt;  // comparison stream, where the check uses one
  index_t pivot = 0;
  int mode = 0;
};

struct Witness {
  CaseSpec spec;
  double violation = 0.0;
  std::string note;
};

struct AxiomVerdict {
  std::string axiom;
  Outcome outcome = Outcome::kPass;
  std::optional<Witness> witness;  // present on fail
  std::uint64_t battery_seed = 0;
  std::size_t battery_size = 0;
  std::size_t cases_evaluated = 0;
  std::size_t cases_precondition_unmet = 0;
};

// The ten checkable axiom identifiers.
const std::vector<std::string>& axiom_names();

AxiomVerdict check_axiom(const Rule& rule, const std::string& axiom, const Battery& battery,
                         const CheckConfig& cfg = {});

// Re-evaluates one stored case; a sound fail witness reproduces a violation
// above the tolerance.
double replay_violation(const Rule& rule, const std::string& axiom, const CaseSpec& spec,
                        const CheckConfig& cfg = {});

// max over consecutive battery pairs of the output/input taxicab ratio
double lipschitz_certificate(const Rule& rule, const Battery& battery, bool parallel = true);

enum class ProbeOutcome { kCertifiedPass, kCertifiedFail, kInconclusive };
const char* probe_outcome_name(ProbeOutcome o);

struct ProbeReport {
  ProbeOutcome outcome = ProbeOutcome::kInconclusive;
  double bound = 0.0;  // certified bound for pass verdicts
  std::string note;
  // Per-step witness values (e.g. the allocation the shrinking inputs keep
  // producing); never shrinks below the claimed floor.
  std::vector<double> witness_values;
  std::optional<Stream> witness_stream;  // last witness input, replayable
};

// Bounded unit responses certify |phi_i(r)-phi_i(r')| <= bound * sup_dist;
// unbounded ones yield shrinking block streams that keep an allocation >= 1.
ProbeReport sup_continuity_probe(const LambdaProfile& p, index_t depth, const Battery& battery,
                                 double tolerance = 1e-9);

// Full transfer-out and profiles with full-retention indices unbounded below
// are certified; otherwise a moving spike keeps phi at lambda while the
// inputs vanish coordinate-wise.
ProbeReport pointwise_continuity_probe(const LambdaProfile& p, index_t depth,
                                       double tolerance = 1e-9);

// Evaluates the rule along left-truncation sequences and the dyadic
// right-truncation sequence; certifies a pass only with a contraction
// certificate from the battery.
ProbeReport taxicab_continuity_probe(const Rule& rule, index_t depth, const Battery& battery,
                                     double tolerance = 1e-9);

}  // namespace geotransfer
