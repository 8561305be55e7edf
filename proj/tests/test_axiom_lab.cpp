#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <memory>
#include <stdexcept>

#include "geotransfer/axiom_lab.hpp"
#include "geotransfer/lambda_profile.hpp"
#include "geotransfer/rule_engine.hpp"

using namespace geotransfer;

namespace {

LambdaProfile uniform_profile(double c) {
  return LambdaProfile(0, {c}, TailSpec::constant(c), TailSpec::constant(c));
}

LambdaProfile periodic_unit_half() {
  return LambdaProfile(0, {1.0, 0.5}, TailSpec::periodic({1.0, 0.5}),
                       TailSpec::periodic({1.0, 0.5}));
}

LambdaProfile venn_profile() {
  return LambdaProfile(0, {1.0}, TailSpec::formula(FormulaId::kVennBlocks),
                       TailSpec::formula(FormulaId::kVennBlocks));
}

LambdaProfile example1_profile() {
  return LambdaProfile(0, {0.0}, TailSpec::formula(FormulaId::kExample1Decay),
                       TailSpec::formula(FormulaId::kExample1Decay));
}

LambdaProfile half_third() {
  return LambdaProfile(0, {0.5, 1.0 / 3.0}, TailSpec::constant(1.0), TailSpec::constant(1.0));
}

// Doubles every income: linear and shift-equivariant, but pushes out more
// than comes in.
class DoubleRule : public Rule {
 public:
  std::string name() const override { return "double"; }
  Stream apply(const Stream& r) const override { return r.scaled(2.0); }
};

Battery small_battery(std::uint64_t seed = 7, std::size_t count = 32) {
  Battery b;
  b.seed = seed;
  b.count = count;
  return b;
}

const std::vector<std::string> kMatrixAxioms = {
    "feasibility", "independence_future_income", "scale_invariance", "continuity",
    "consistency"};

}  // namespace

TEST_CASE("battery is deterministic in its seed") {
  const Battery a = small_battery(11, 40);
  const Battery b = small_battery(11, 40);
  const Battery c = small_battery(12, 40);
  const auto sa = a.streams();
  const auto sb = b.streams();
  const auto sc = c.streams();
  REQUIRE(sa.size() == sb.size());
  for (std::size_t k = 0; k < sa.size(); ++k) CHECK(exact_equal(sa[k], sb[k]));
  bool any_diff = false;
  for (std::size_t k = 0; k < sa.size() && !any_diff; ++k)
    if (!exact_equal(sa[k], sc[k])) any_diff = true;
  CHECK(any_diff);
}

TEST_CASE("battery fixtures precede the random part and avoid left-only tails") {
  const Battery b = small_battery(3, 50);
  const auto fixed = Battery::fixtures();
  const auto all = b.streams();
  REQUIRE(all.size() == fixed.size() + 50);
  for (std::size_t k = 0; k < fixed.size(); ++k) CHECK(exact_equal(all[k], fixed[k]));
  for (std::size_t k = fixed.size(); k < all.size(); ++k)
    CHECK(!(all[k].left_tail() && !all[k].right_tail()));
}

TEST_CASE("geometric rules pass the five matrix axioms") {
  const Battery b = small_battery(21, 32);
  for (const LambdaProfile& p : {uniform_profile(0.5), uniform_profile(1.0),
                                 periodic_unit_half(), venn_profile(), example1_profile(),
                                 half_third()}) {
    const GeometricRule rule(p);
    for (const std::string& ax : kMatrixAxioms) {
      const AxiomVerdict v = check_axiom(rule, ax, b);
      INFO(rule.profile().window_lo(), " axiom ", ax);
      CHECK(v.outcome == Outcome::kPass);
    }
  }
}

TEST_CASE("balance splits the family by vanishing retention products") {
  const Battery b = small_battery(5, 24);
  CHECK(check_axiom(GeometricRule(uniform_profile(0.5)), "balance", b).outcome ==
        Outcome::kPass);
  CHECK(check_axiom(GeometricRule(venn_profile()), "balance", b).outcome == Outcome::kPass);
  CHECK(check_axiom(GeometricRule(periodic_unit_half()), "balance", b).outcome ==
        Outcome::kPass);

  const AxiomVerdict leak = check_axiom(GeometricRule(example1_profile()), "balance", b);
  CHECK(leak.outcome == Outcome::kFail);
  REQUIRE(leak.witness.has_value());
  CHECK(leak.witness->violation > 1e-3);
}

TEST_CASE("zero inessential and remaining axioms behave on geometric rules") {
  const Battery b = small_battery(9, 24);
  const GeometricRule half(uniform_profile(0.5));
  CHECK(check_axiom(half, "zero_inessential", b).outcome == Outcome::kPass);
  CHECK(check_axiom(half, "independence_future_streams", b).outcome == Outcome::kPass);
  CHECK(check_axiom(half, "translation_invariance", b).outcome == Outcome::kPass);

  // A window profile is anchored to absolute indices, so shifting breaks it.
  const GeometricRule pinned(half_third());
  CHECK(check_axiom(pinned, "translation_invariance", b).outcome == Outcome::kFail);
}

TEST_CASE("idempotency holds exactly at the degenerate retention rates") {
  const Battery b = small_battery(13, 24);
  CHECK(check_axiom(GeometricRule(uniform_profile(0.0)), "idempotency", b).outcome ==
        Outcome::kPass);
  CHECK(check_axiom(GeometricRule(uniform_profile(1.0)), "idempotency", b).outcome ==
        Outcome::kPass);
  for (double c : {0.1, 0.5, 0.9}) {
    const AxiomVerdict v = check_axiom(GeometricRule(uniform_profile(c)), "idempotency", b);
    INFO("rate ", c);
    CHECK(v.outcome == Outcome::kFail);
  }
}

TEST_CASE("unknown axiom ids are rejected") {
  const Battery b = small_battery();
  CHECK_THROWS_AS(check_axiom(GeometricRule(uniform_profile(0.5)), "monotonicity", b),
                  std::invalid_argument);
}

TEST_CASE("fail verdicts carry a replayable witness") {
  const Battery b = small_battery(17, 24);
  const DoubleRule doubler;
  const CheckConfig cfg;
  for (const std::string& ax : {std::string("feasibility"), std::string("balance")}) {
    const AxiomVerdict v = check_axiom(doubler, ax, b, cfg);
    REQUIRE(v.outcome == Outcome::kFail);
    REQUIRE(v.witness.has_value());
    const double replayed = replay_violation(doubler, ax, v.witness->spec, cfg);
    CHECK(replayed == v.witness->violation);
    CHECK(replayed > cfg.tolerance);
  }
}

TEST_CASE("verdicts are identical under serial and parallel evaluation") {
  const Battery b = small_battery(29, 32);
  CheckConfig serial;
  serial.parallel = false;
  CheckConfig parallel;
  parallel.parallel = true;
  const GeometricRule rule(example1_profile());
  for (const std::string& ax : axiom_names()) {
    const AxiomVerdict vs = check_axiom(rule, ax, b, serial);
    const AxiomVerdict vp = check_axiom(rule, ax, b, parallel);
    CHECK(vs.outcome == vp.outcome);
    CHECK(vs.cases_evaluated == vp.cases_evaluated);
    CHECK(vs.cases_precondition_unmet == vp.cases_precondition_unmet);
    REQUIRE(vs.witness.has_value() == vp.witness.has_value());
    if (vs.witness) {
      CHECK(vs.witness->violation == vp.witness->violation);
      CHECK(exact_equal(vs.witness->spec.r, vp.witness->spec.r));
      CHECK(vs.witness->spec.pivot == vp.witness->spec.pivot);
    }
  }
}

TEST_CASE("consistency sweep counts pivots that leave the admissible cone") {
  const Battery b = small_battery(31, 16);
  CheckConfig cfg;
  cfg.full_consistency_sweep = true;
  const AxiomVerdict geo = check_axiom(GeometricRule(uniform_profile(0.5)), "consistency",
                                       b, cfg);
  CHECK(geo.outcome == Outcome::kPass);
  CHECK(geo.cases_precondition_unmet == 0);

  const AxiomVerdict dbl = check_axiom(DoubleRule(), "consistency", b, cfg);
  CHECK(dbl.outcome == Outcome::kPass);
  CHECK(dbl.cases_precondition_unmet > 0);
}

TEST_CASE("meta relations between the axioms hold on the sample rules") {
  const Battery b = small_battery(37, 24);
  std::vector<std::unique_ptr<Rule>> rules;
  rules.push_back(std::make_unique<DoubleRule>());
  rules.push_back(std::make_unique<GeometricRule>(uniform_profile(0.5)));
  rules.push_back(std::make_unique<GeometricRule>(example1_profile()));
  rules.push_back(std::make_unique<GeometricRule>(venn_profile()));
  for (const auto& rule : rules) {
    auto outcome = [&](const std::string& ax) { return check_axiom(*rule, ax, b).outcome; };
    const bool ifi = outcome("independence_future_income") == Outcome::kPass;
    const bool cont = outcome("continuity") == Outcome::kPass;
    const bool ifs = outcome("independence_future_streams") == Outcome::kFail;
    CHECK(!(ifi && cont && ifs));
    const bool ifs_pass = outcome("independence_future_streams") == Outcome::kPass;
    const bool feas = outcome("feasibility") == Outcome::kPass;
    const bool zero_fail = outcome("zero_inessential") == Outcome::kFail;
    CHECK(!(ifs_pass && feas && zero_fail));
  }
}

TEST_CASE("contraction certificate stays at one for geometric rules") {
  const Battery b = small_battery(41, 40);
  CHECK(lipschitz_certificate(GeometricRule(uniform_profile(0.5)), b) <= 1.0 + 1e-9);
  CHECK(lipschitz_certificate(GeometricRule(venn_profile()), b) <= 1.0 + 1e-9);
  const double doubled = lipschitz_certificate(DoubleRule(), b);
  CHECK(doubled > 1.5);
  CHECK(doubled <= 2.0 + 1e-9);
}

TEST_CASE("sup probe certifies bounded profiles and exhibits witness blocks otherwise") {
  const Battery b = small_battery(43, 24);
  const ProbeReport half = sup_continuity_probe(uniform_profile(0.5), 12, b);
  CHECK(half.outcome == ProbeOutcome::kCertifiedPass);
  CHECK(half.bound == doctest::Approx(1.0));

  const ProbeReport zero = sup_continuity_probe(uniform_profile(0.0), 12, b);
  CHECK(zero.outcome == ProbeOutcome::kCertifiedPass);
  CHECK(zero.bound == 0.0);

  for (const LambdaProfile& p : {example1_profile(), venn_profile()}) {
    const ProbeReport rep = sup_continuity_probe(p, 12, b);
    CHECK(rep.outcome == ProbeOutcome::kCertifiedFail);
    REQUIRE(rep.witness_values.size() == 12);
    for (double v : rep.witness_values) CHECK(v >= 1.0 - 1e-9);
    REQUIRE(rep.witness_stream.has_value());
    CHECK(rep.witness_stream->sup_norm() == doctest::Approx(1.0 / 12.0));
  }
}

TEST_CASE("sup probe outcome is stable as the requested depth grows") {
  const Battery b = small_battery(47, 16);
  for (index_t depth : {4, 8, 16}) {
    CHECK(sup_continuity_probe(uniform_profile(0.5), depth, b).outcome ==
          ProbeOutcome::kCertifiedPass);
    CHECK(sup_continuity_probe(venn_profile(), depth, b).outcome ==
          ProbeOutcome::kCertifiedFail);
  }
}

TEST_CASE("pointwise probe separates finite dependency from deep spikes") {
  CHECK(pointwise_continuity_probe(uniform_profile(0.0), 20).outcome ==
        ProbeOutcome::kCertifiedPass);
  CHECK(pointwise_continuity_probe(venn_profile(), 20).outcome ==
        ProbeOutcome::kCertifiedPass);
  CHECK(pointwise_continuity_probe(periodic_unit_half(), 20).outcome ==
        ProbeOutcome::kCertifiedPass);
  CHECK(pointwise_continuity_probe(uniform_profile(1.0), 20).outcome ==
        ProbeOutcome::kCertifiedPass);

  const ProbeReport half = pointwise_continuity_probe(uniform_profile(0.5), 40);
  CHECK(half.outcome == ProbeOutcome::kCertifiedFail);
  CHECK(half.bound == 0.5);
  REQUIRE(half.witness_values.size() == 40);
  for (double v : half.witness_values) CHECK(v == 0.5);

  const ProbeReport e1 = pointwise_continuity_probe(example1_profile(), 20);
  CHECK(e1.outcome == ProbeOutcome::kCertifiedFail);
  CHECK(e1.bound > 0.0);
}

TEST_CASE("taxicab probe certifies contractions and flags expansions honestly") {
  const Battery b = small_battery(53, 24);
  const ProbeReport geo = taxicab_continuity_probe(GeometricRule(uniform_profile(0.5)), 64, b);
  CHECK(geo.outcome == ProbeOutcome::kCertifiedPass);
  CHECK(geo.bound <= 1.0 + 1e-9);

  // Linear expansion: every truncation sequence converges, but no
  // contraction certificate exists, so the probe must not claim a pass.
  const ProbeReport dbl = taxicab_continuity_probe(DoubleRule(), 64, b);
  CHECK(dbl.outcome == ProbeOutcome::kInconclusive);
  CHECK(dbl.bound > 1.5);
}

TEST_CASE("continuity check accepts geometric rules on the truncation battery") {
  const Battery b = small_battery(59, 16);
  for (const LambdaProfile& p : {uniform_profile(0.5), example1_profile(), venn_profile()}) {
    CHECK(check_axiom(GeometricRule(p), "continuity", b).outcome == Outcome::kPass);
  }
}
