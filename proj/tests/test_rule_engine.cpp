#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "geotransfer/rule_engine.hpp"

using namespace geotransfer;

namespace {

// lambda_0 = 1/2, lambda_1 = 1/3, full transfer-out blocked everywhere else
LambdaProfile half_third() {
  return LambdaProfile(0, {0.5, 1.0 / 3.0}, TailSpec::constant(1.0), TailSpec::constant(1.0));
}

LambdaProfile example1_profile() {
  return LambdaProfile(0, {}, TailSpec::formula(FormulaId::kExample1Decay),
                       TailSpec::formula(FormulaId::kExample1Decay));
}

LambdaProfile venn_profile() {
  return LambdaProfile(0, {}, TailSpec::formula(FormulaId::kVennBlocks),
                       TailSpec::formula(FormulaId::kVennBlocks));
}

LambdaProfile periodic_unit_half() {
  return LambdaProfile(0, {}, TailSpec::periodic({1.0, 0.5}),
                       TailSpec::periodic({1.0, 0.5}));
}

std::vector<LambdaProfile> reference_profiles() {
  return {
      LambdaProfile::uniform(0.0),
      LambdaProfile::uniform(0.25),
      LambdaProfile::uniform(0.5),
      LambdaProfile::uniform(1.0),
      half_third(),
      example1_profile(),
      venn_profile(),
      periodic_unit_half(),
      LambdaProfile(-2, {0.0, 1.0, 0.3}, TailSpec::constant(0.2),
                    TailSpec::periodic({0.1, 0.9, 0.0})),
  };
}

std::vector<Stream> reference_streams() {
  return {
      Stream::basis(0),
      Stream::basis(3),
      Stream::basis(-4),
      Stream(0, {6.0, 3.0}),
      Stream(-2, {3.0, 0.0, 1.0, 4.0}, GeometricTail{2.0, 0.5}, GeometricTail{1.0, 0.25}),
      Stream(0, {1.0}, std::nullopt, GeometricTail{0.5, 0.5}),
      Stream(1, {2.0}, GeometricTail{1.0, 0.75}, std::nullopt),
  };
}

double uniform01(std::mt19937_64& gen) {
  return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

LambdaProfile random_profile(std::mt19937_64& gen) {
  const index_t lo = static_cast<index_t>(gen() % 9) - 4;
  const std::size_t n = gen() % 6;
  std::vector<double> vals;
  for (std::size_t k = 0; k < n; ++k) {
    const double u = uniform01(gen);
    vals.push_back(u < 0.15 ? 0.0 : (u > 0.85 ? 1.0 : u));
  }
  auto side = [&]() {
    switch (gen() % 4) {
      case 0:
        return TailSpec::constant(uniform01(gen));
      case 1: {
        std::vector<double> pat;
        const std::size_t m = 1 + gen() % 3;
        for (std::size_t k = 0; k < m; ++k) pat.push_back(uniform01(gen));
        return TailSpec::periodic(pat);
      }
      case 2:
        return TailSpec::formula(FormulaId::kExample1Decay);
      default:
        return TailSpec::formula(FormulaId::kVennBlocks);
    }
  };
  return LambdaProfile(lo, vals, side(), side());
}

Stream random_stream(std::mt19937_64& gen, bool allow_left_tail = true) {
  const index_t lo = static_cast<index_t>(gen() % 13) - 6;
  const std::size_t n = 1 + gen() % 8;
  std::vector<double> vals;
  for (std::size_t k = 0; k < n; ++k)
    vals.push_back(uniform01(gen) < 0.2 ? 0.0 : 10.0 * uniform01(gen));
  std::optional<GeometricTail> left, right;
  if (allow_left_tail && gen() % 3 == 0)
    left = GeometricTail{5.0 * uniform01(gen) + 0.01, 0.9 * uniform01(gen)};
  if (gen() % 3 == 0)
    right = GeometricTail{5.0 * uniform01(gen) + 0.01, 0.9 * uniform01(gen)};
  return Stream(lo, vals, left, right);
}

}  // namespace

TEST_CASE("incoming transfer: worked two-rate example") {
  const LambdaProfile p = half_third();
  const Stream r(0, {6.0, 3.0});
  CHECK(incoming_transfer(p, r, 0) == 0.0);
  CHECK(incoming_transfer(p, r, 1) == 3.0);
  CHECK(incoming_transfer(p, r, 2) == 4.0);
  CHECK(incoming_transfer(p, r, 3) == 0.0);  // index 2 passes nothing on

  const AllocationResult a = allocate(p, r, -1, 4);
  REQUIRE(a.allocations.size() == 6);
  CHECK(a.allocations[0] == 0.0);
  CHECK(a.allocations[1] == 3.0);
  CHECK(a.allocations[2] == 2.0);
  CHECK(a.allocations[3] == 4.0);
  CHECK(a.allocations[4] == 0.0);
  CHECK(a.allocations[5] == 0.0);
  CHECK(a.residual_transfer == 0.0);
  CHECK(a.leaked_mass == 0.0);
  CHECK(a.tail_allocation_sum == 0.0);
  CHECK(total_allocated(p, r) == 9.0);
}

TEST_CASE("uniform one-half on a unit spike: exact dyadic allocations") {
  const LambdaProfile p = LambdaProfile::uniform(0.5);
  const Stream r = Stream::basis(0);
  const AllocationResult a = allocate(p, r, 0, 20);
  for (index_t i = 0; i <= 20; ++i)
    CHECK(a.allocations[static_cast<std::size_t>(i)] == std::ldexp(1.0, -static_cast<int>(i) - 1));
  CHECK(a.residual_transfer == std::ldexp(1.0, -21));
  CHECK(a.leaked_mass == 0.0);  // the deep product vanishes
  CHECK(a.tail_allocation_sum == a.residual_transfer);
  CHECK(total_allocated(p, r) == 1.0);
}

TEST_CASE("degenerate profiles: full transfer allocates nothing, no transfer is the identity") {
  const Stream r(0, {1.0, 0.0, 0.0, 0.0, 0.0, 3.0});

  const LambdaProfile full = LambdaProfile::uniform(0.0);
  const AllocationResult af = allocate(full, r, 0, 8);
  for (double v : af.allocations) CHECK(v == 0.0);
  CHECK(af.residual_transfer == 4.0);
  CHECK(af.leaked_mass == 4.0);
  CHECK(af.tail_allocation_sum == 0.0);
  CHECK(total_allocated(full, r) == 0.0);

  const LambdaProfile none = LambdaProfile::uniform(1.0);
  const AllocationResult an = allocate(none, r, 0, 8);
  for (index_t i = 0; i <= 8; ++i)
    CHECK(an.allocations[static_cast<std::size_t>(i)] == r.value_at(i));
  CHECK(an.residual_transfer == 0.0);
  CHECK(total_allocated(none, r) == r.taxicab_norm());
}

TEST_CASE("allocate rejects windows starting above carried income") {
  const LambdaProfile p = LambdaProfile::uniform(0.5);
  CHECK_THROWS_AS(allocate(p, Stream::basis(0), 1, 5), std::invalid_argument);
  CHECK_THROWS_AS(allocate(p, Stream::basis(0), 5, 1), std::invalid_argument);
  CHECK_NOTHROW(allocate(p, Stream::basis(0), -3, 5));
  // a left income tail folds into the seed instead of blocking the window
  const Stream tailed(0, {1.0}, GeometricTail{1.0, 0.5}, std::nullopt);
  const AllocationResult a = allocate(p, tailed, 0, 4);
  CHECK(a.allocations[0] == doctest::Approx(0.5 * (1.0 + incoming_transfer(p, tailed, 0)))
                                .epsilon(1e-15));
}

TEST_CASE("direct summation agrees with the recurrence") {
  std::mt19937_64 gen(2024);
  for (int t = 0; t < 160; ++t) {
    const LambdaProfile p = random_profile(gen);
    const Stream r = random_stream(gen);
    const index_t lo = std::min(r.window_lo(), p.window_lo()) - 3;
    const index_t hi = std::max(r.window_hi(), p.window_hi()) + 6;
    AllocationResult a;
    try {
      a = allocate(p, r, lo, hi);
    } catch (const std::invalid_argument&) {
      continue;
    }
    const double scale = std::max(1.0, r.taxicab_norm());
    for (index_t i = lo; i <= hi; ++i) {
      const double direct = allocate_direct(p, r, i);
      CHECK(std::abs(a.allocations[static_cast<std::size_t>(i - lo)] - direct) <=
            1e-10 * scale);
    }
  }
}

TEST_CASE("mass accounting: window totals, prefix totals, leak identity") {
  std::mt19937_64 gen(7311);
  for (int t = 0; t < 160; ++t) {
    const LambdaProfile p = random_profile(gen);
    const Stream r = random_stream(gen);
    const index_t lo = std::min(r.window_lo(), p.window_lo()) - 4;
    const index_t hi = std::max(r.window_hi(), p.window_hi()) + 9;
    const AllocationResult a = allocate(p, r, lo, hi);
    const double scale = std::max(1.0, r.taxicab_norm());

    double window_sum = 0.0;
    for (double v : a.allocations) window_sum += v;
    const double total = total_allocated(p, r);
    CHECK(std::abs(total_below(p, r, lo) + window_sum + a.tail_allocation_sum - total) <=
          1e-9 * scale);
    CHECK(std::abs(total + a.leaked_mass - r.taxicab_norm()) <= 1e-9 * scale);

    // prefix totals against the running window sums
    double prefix = total_below(p, r, lo);
    for (index_t i = lo; i < hi; ++i) {
      prefix += a.allocations[static_cast<std::size_t>(i - lo)];
      CHECK(std::abs(total_below(p, r, i + 1) - prefix) <= 1e-9 * scale);
    }
  }
}

TEST_CASE("rule application matches direct summation everywhere, tails included") {
  for (const LambdaProfile& p : reference_profiles()) {
    const GeometricRule rule(p);
    for (const Stream& r : reference_streams()) {
      const Stream phi = rule.apply(r);
      const double scale = std::max(1.0, r.taxicab_norm());
      std::vector<index_t> probes = probe_indices({&r, &phi}, 12);
      // push well into both synthesized tails
      probes.push_back(phi.window_lo() - 40);
      probes.push_back(phi.window_hi() + 40);
      for (index_t i : probes) {
        const double direct = allocate_direct(p, r, i);
        CHECK(std::abs(phi.value_at(i) - direct) <= 1e-9 * scale);
      }
    }
  }
}

TEST_CASE("rule application: random cross-check against direct summation") {
  std::mt19937_64 gen(90210);
  for (int t = 0; t < 120; ++t) {
    const LambdaProfile p = random_profile(gen);
    const GeometricRule rule(p);
    const Stream r = random_stream(gen);
    const Stream phi = rule.apply(r);
    const double scale = std::max(1.0, r.taxicab_norm());
    for (index_t i : probe_indices({&r, &phi}, 10)) {
      const double direct = allocate_direct(p, r, i);
      CHECK(std::abs(phi.value_at(i) - direct) <= 1e-9 * scale);
    }
    // the output never carries more mass than the input
    CHECK(phi.taxicab_norm() <= r.taxicab_norm() + 1e-9 * scale);
    CHECK(std::abs(phi.taxicab_norm() - total_allocated(p, r)) <= 1e-8 * scale);
  }
}

TEST_CASE("uniform one-half spike response is exactly geometric") {
  const GeometricRule rule(LambdaProfile::uniform(0.5));
  const Stream phi = rule.apply(Stream::basis(0));
  for (index_t i = 0; i <= 60; ++i)
    CHECK(phi.value_at(i) == std::ldexp(1.0, -static_cast<int>(i) - 1));
  CHECK(phi.value_at(-1) == 0.0);
  CHECK(phi.taxicab_norm() == 1.0);
}

TEST_CASE("exact left tail synthesis under a constant rate") {
  const GeometricRule rule(LambdaProfile::uniform(0.5));
  const Stream r(0, {1.0}, GeometricTail{1.0, 0.5}, std::nullopt);
  const Stream phi = rule.apply(r);
  REQUIRE(phi.left_tail().has_value());
  // phi_{-d} = (2/3) * (1/2)^(d-1): worked by direct summation
  CHECK(phi.value_at(-1) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(phi.value_at(-2) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK(allocate_direct(rule.profile(), r, -2) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK(std::abs(phi.taxicab_norm() - r.taxicab_norm()) <= 1e-12);
}

TEST_CASE("two-mode right tail synthesis under a constant rate") {
  const GeometricRule rule(LambdaProfile::uniform(0.25));
  const Stream r(0, {1.0}, std::nullopt, GeometricTail{1.0, 0.5});
  const Stream phi = rule.apply(r);
  CHECK(phi.value_at(1) == doctest::Approx(0.25 * (1.0 + 0.75)).epsilon(1e-15));
  for (index_t i : {2, 3, 5, 9, 20, 45}) {
    const double m = static_cast<double>(i - 1);
    const double expected =
        0.9375 * std::pow(0.75, m) - 0.5 * std::pow(0.5, m);
    CHECK(phi.value_at(i) == doctest::Approx(expected).epsilon(1e-12));
  }
  CHECK(std::abs(phi.taxicab_norm() - r.taxicab_norm()) <= 1e-11);
}

TEST_CASE("balanced profiles pass all mass through") {
  const std::vector<LambdaProfile> balanced = {
      LambdaProfile::uniform(0.5), LambdaProfile::uniform(1.0), periodic_unit_half(),
      venn_profile(), half_third()};
  for (const LambdaProfile& p : balanced) {
    REQUIRE(p.classify().in_B);
    const GeometricRule rule(p);
    for (const Stream& r : reference_streams()) {
      const double scale = std::max(1.0, r.taxicab_norm());
      CHECK(std::abs(rule.apply(r).taxicab_norm() - r.taxicab_norm()) <= 1e-9 * scale);
      CHECK(std::abs(total_allocated(p, r) - r.taxicab_norm()) <= 1e-9 * scale);
    }
  }
}

TEST_CASE("application is positively homogeneous") {
  std::mt19937_64 gen(5150);
  for (int t = 0; t < 40; ++t) {
    const LambdaProfile p = random_profile(gen);
    const GeometricRule rule(p);
    const Stream r = random_stream(gen);
    const double a = 4.0 * uniform01(gen);
    const Stream lhs = rule.apply(r.scaled(a));
    const Stream rhs = rule.apply(r).scaled(a);
    const double scale = std::max(1.0, a * r.taxicab_norm());
    for (index_t i : probe_indices({&lhs, &rhs}, 6))
      CHECK(std::abs(lhs.value_at(i) - rhs.value_at(i)) <= 1e-10 * scale);
  }
}

TEST_CASE("consistency transform folds the retained balance onto the pivot") {
  const GeometricRule rule(LambdaProfile::uniform(0.5));
  const Stream r(0, {6.0, 3.0});
  const Stream r1 = consistency_transform(rule, r, 1);
  CHECK(exact_equal(r1, Stream(1, {6.0})));
  const Stream r0 = consistency_transform(rule, r, 0);
  CHECK(exact_equal(r0, r));

  // pivot above the window: the whole mass rides the transfer
  const Stream r5 = consistency_transform(rule, r, 5);
  CHECK(r5.value_at(5) == doctest::Approx(incoming_transfer(rule.profile(), r, 5)).epsilon(1e-15));
  for (index_t i = 0; i < 5; ++i) CHECK(r5.value_at(i) == 0.0);

  // right income tails survive the fold, re-anchored
  const Stream tailed(0, {1.0}, std::nullopt, GeometricTail{1.0, 0.5});
  const Stream t2 = consistency_transform(rule, tailed, 2);
  CHECK(t2.value_at(3) == tailed.value_at(3));
  CHECK(t2.value_at(7) == tailed.value_at(7));
  CHECK(t2.value_at(1) == 0.0);
}

TEST_CASE("consistency transform rejects an overdrawn past") {
  struct Doubler : Rule {
    std::string name() const override { return "doubler"; }
    Stream apply(const Stream& r) const override { return r.scaled(2.0); }
  } doubler;
  // any pivot with income strictly below it has a negative leftover
  CHECK_THROWS_AS(consistency_transform(doubler, Stream(0, {3.0, 1.0}), 1),
                  std::domain_error);
  CHECK_THROWS_AS(consistency_transform(doubler, Stream(0, {1.0, 1.0}), 1),
                  std::domain_error);
  // with nothing below the pivot the leftover is exactly zero and folding
  // changes nothing
  const Stream lone(0, {0.0, 1.0});
  const Stream folded = consistency_transform(doubler, lone, 1);
  CHECK(exact_equal(folded, Stream(1, {1.0})));
}

TEST_CASE("generic and closed-form residuals agree") {
  std::mt19937_64 gen(424242);
  for (int t = 0; t < 60; ++t) {
    const LambdaProfile p = random_profile(gen);
    const GeometricRule rule(p);
    const Stream r = random_stream(gen);
    const double scale = std::max(1.0, r.taxicab_norm());
    for (index_t j : {r.window_lo() - 2, r.window_lo() + 1, r.window_hi() + 3}) {
      const double generic = rule.Rule::residual_below(r, j);
      CHECK(std::abs(rule.residual_below(r, j) - generic) <= 1e-8 * scale);
    }
  }
}

TEST_CASE("retention rates are recoverable from spike responses") {
  for (const LambdaProfile& p : reference_profiles()) {
    const GeometricRule rule(p);
    const LambdaRecovery rec = recover_lambda(rule, -6, 10);
    REQUIRE(rec.feasible);
    for (index_t i = -6; i <= 10; ++i)
      CHECK(rec.values[static_cast<std::size_t>(i + 6)] == p.lambda_at(i));
  }
  struct Doubler : Rule {
    std::string name() const override { return "doubler"; }
    Stream apply(const Stream& r) const override { return r.scaled(2.0); }
  } doubler;
  CHECK_FALSE(recover_lambda(doubler, 0, 3).feasible);
}
