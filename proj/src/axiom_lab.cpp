#include "geotransfer/axiom_lab.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "geotransfer/parallel.hpp"
#include "geotransfer/rng.hpp"

namespace geotransfer {
namespace {

enum class AxiomId {
  kFeasibility,
  kBalance,
  kScale,
  kFutureIncome,
  kFutureStreams,
  kZeroInessential,
  kTranslation,
  kIdempotency,
  kConsistency,
  kContinuity,
};

const std::vector<std::string> kAxiomNames = {
    "feasibility",
    "balance",
    "scale_invariance",
    "independence_future_income",
    "independence_future_streams",
    "zero_inessential",
    "translation_invariance",
    "idempotency",
    "consistency",
    "continuity",
};

std::optional<AxiomId> axiom_from_name(const std::string& name) {
  for (std::size_t k = 0; k < kAxiomNames.size(); ++k)
    if (kAxiomNames[k] == name) return static_cast<AxiomId>(k);
  return std::nullopt;
}

Stream dyadic_limit() { return Stream(0, {1.0}, std::nullopt, GeometricTail{0.5, 0.5}); }

Stream dyadic_truncation(index_t m) {
  std::vector<double> vals;
  vals.reserve(static_cast<std::size_t>(m) + 1);
  for (index_t i = 0; i <= m; ++i) vals.push_back(std::ldexp(1.0, -static_cast<int>(i)));
  return Stream(0, std::move(vals));
}

// The stream restricted to indices < cut: window and left tail kept, right
// side dropped (tail values up to the cut materialized first).
Stream keep_below(const Stream& s, index_t cut) {
  if (cut <= s.window_lo()) {
    if (!s.left_tail()) return Stream::zero();
    return Stream(cut, {}, s.left_tail()->reanchored(s.window_lo() - cut), std::nullopt);
  }
  std::vector<double> vals;
  vals.reserve(static_cast<std::size_t>(cut - s.window_lo()));
  for (index_t i = s.window_lo(); i < cut; ++i) vals.push_back(s.value_at(i));
  return Stream(s.window_lo(), std::move(vals), s.left_tail(), std::nullopt);
}

struct CaseResult {
  enum Status { kOk, kViolated, kUnmet } status = kOk;
  double violation = 0.0;
  std::string note;
};

CaseResult violated(double v, std::string note) {
  return CaseResult{CaseResult::kViolated, v, std::move(note)};
}

double threshold(double tol, const Stream& r) { return tol * std::max(1.0, r.taxicab_norm()); }

std::vector<index_t> default_pivots(const Stream& r) {
  const index_t lo = r.window_lo();
  index_t hi = r.window_hi();
  if (hi < lo) hi = lo;
  std::vector<index_t> js = {lo + 1, lo + (hi - lo) / 2 + 1, hi, hi + 2};
  std::sort(js.begin(), js.end());
  js.erase(std::unique(js.begin(), js.end()), js.end());
  return js;
}

std::vector<index_t> consistency_pivots(const Stream& r, bool full_sweep) {
  const index_t lo = r.support_lo().value_or(r.window_lo());
  if (!full_sweep) {
    std::vector<index_t> js = {lo - 2, lo, r.window_hi() + 1};
    std::sort(js.begin(), js.end());
    js.erase(std::unique(js.begin(), js.end()), js.end());
    return js;
  }
  std::vector<index_t> js;
  for (index_t j = r.window_lo() - 2; j <= r.window_hi() + 2; ++j) js.push_back(j);
  return js;
}

Stream resample_above(const Stream& r, index_t j, std::mt19937_64& gen, const Battery& b) {
  const Stream base = keep_below(r, j + 1);
  const index_t start = j + 1 + static_cast<index_t>(gen() % 3);
  const std::size_t len = 1 + gen() % 6;
  std::vector<double> vals;
  for (std::size_t k = 0; k < len; ++k) vals.push_back(b.max_value * uniform01(gen));
  std::optional<GeometricTail> right;
  if (gen() % 2 == 0)
    right = GeometricTail{0.01 + 2.0 * uniform01(gen), b.max_ratio * uniform01(gen)};
  return add(base, Stream(start, std::move(vals), std::nullopt, right));
}

std::vector<CaseSpec> make_cases(AxiomId id, const std::vector<Stream>& streams,
                                 const Battery& battery, const CheckConfig& cfg) {
  std::vector<CaseSpec> cases;
  switch (id) {
    case AxiomId::kFeasibility:
    case AxiomId::kBalance:
    case AxiomId::kScale:
    case AxiomId::kTranslation:
    case AxiomId::kIdempotency:
      for (const Stream& r : streams) cases.push_back({r, std::nullopt, 0, 0});
      break;
    case AxiomId::kFutureIncome:
      for (const Stream& r : streams)
        for (index_t j : default_pivots(r)) cases.push_back({r, std::nullopt, j, 0});
      break;
    case AxiomId::kFutureStreams: {
      std::size_t idx = 0;
      for (const Stream& r : streams)
        for (index_t j : default_pivots(r)) {
          std::mt19937_64 gen(splitmix64(battery.seed ^ (0x1F5Au + 977u * ++idx)));
          cases.push_back({r, resample_above(r, j, gen, battery), j, 0});
        }
      break;
    }
    case AxiomId::kZeroInessential:
      for (const Stream& r : streams) {
        if (r.left_tail()) continue;
        if (r.is_zero()) {
          cases.push_back({r, std::nullopt, r.window_hi() + 64, 0});
          continue;
        }
        cases.push_back({r, std::nullopt, *r.support_lo(), 0});
      }
      break;
    case AxiomId::kConsistency:
      for (const Stream& r : streams)
        for (index_t j : consistency_pivots(r, cfg.full_consistency_sweep))
          cases.push_back({r, std::nullopt, j, 0});
      break;
    case AxiomId::kContinuity:
      cases.push_back({dyadic_limit(), std::nullopt, 0, 1});
      for (const Stream& r : streams)
        if (r.has_left_mass()) cases.push_back({r, std::nullopt, 0, 2});
      break;
  }
  return cases;
}

CaseResult evaluate_case(const Rule& rule, AxiomId id, const CaseSpec& c,
                         const CheckConfig& cfg) {
  const double thr = threshold(cfg.tolerance, c.r);
  switch (id) {
    case AxiomId::kFeasibility: {
      const double v = rule.apply(c.r).taxicab_norm() - c.r.taxicab_norm();
      if (v > thr) return violated(v, "aggregate allocation exceeds aggregate income");
      return {};
    }
    case AxiomId::kBalance: {
      const double v = std::abs(rule.apply(c.r).taxicab_norm() - c.r.taxicab_norm());
      if (v > thr) return violated(v, "aggregate allocation misses aggregate income");
      return {};
    }
    case AxiomId::kScale: {
      const Stream phi = rule.apply(c.r);
      for (double a : {0.0, 0.5, 2.0}) {
        const double d = taxicab_dist(rule.apply(c.r.scaled(a)), phi.scaled(a));
        if (d > cfg.tolerance * std::max(1.0, a * c.r.taxicab_norm()))
          return violated(d, "rescaling the income does not rescale the allocation");
      }
      return {};
    }
    case AxiomId::kFutureIncome: {
      const Stream phi_below = keep_below(rule.apply(c.r), c.pivot);
      const double rj = c.r.value_at(c.pivot);
      double worst = 0.0;
      auto consider = [&](double nv) {
        if (nv < 0.0 || nv == rj) return;
        const double d =
            taxicab_dist(keep_below(rule.apply(c.r.with_value(c.pivot, nv)), c.pivot),
                         phi_below);
        worst = std::max(worst, d);
      };
      consider(0.0);
      consider(rj * 0.5);
      consider(rj * 2.0);
      consider(rj + 1.0);
      consider(rj - 1.0);
      if (worst > thr)
        return violated(worst, "perturbing one later income moves earlier allocations");
      return {};
    }
    case AxiomId::kFutureStreams: {
      const double d = taxicab_dist(keep_below(rule.apply(c.r), c.pivot + 1),
                                    keep_below(rule.apply(*c.alt), c.pivot + 1));
      if (d > thr)
        return violated(d, "replacing the stream beyond the pivot moves allocations at or "
                           "before it");
      return {};
    }
    case AxiomId::kZeroInessential: {
      const double v = keep_below(rule.apply(c.r), c.pivot).taxicab_norm();
      if (v > thr)
        return violated(v, "an index with no income at or before it receives an allocation");
      return {};
    }
    case AxiomId::kTranslation: {
      const double d =
          taxicab_dist(rule.apply(c.r.shifted(1)), rule.apply(c.r).shifted(1));
      if (d > thr) return violated(d, "shifting the income does not shift the allocation");
      return {};
    }
    case AxiomId::kIdempotency: {
      const Stream phi = rule.apply(c.r);
      const double d = taxicab_dist(rule.apply(phi), phi);
      if (d > thr) return violated(d, "reapplying the rule moves the allocation");
      return {};
    }
    case AxiomId::kConsistency: {
      Stream folded;
      try {
        folded = consistency_transform(rule, c.r, c.pivot);
      } catch (const std::domain_error&) {
        return CaseResult{CaseResult::kUnmet, 0.0,
                          "folded stream leaves the admissible cone"};
      }
      const double d = taxicab_dist(rule.apply(folded).truncate_left(-c.pivot),
                                    rule.apply(c.r).truncate_left(-c.pivot));
      if (d > thr)
        return violated(d, "allocations from the pivot onward change after folding the past");
      return {};
    }
    case AxiomId::kContinuity: {
      Stream limit = c.mode == 1 ? dyadic_limit() : c.r;
      Stream rm = c.mode == 1
                      ? dyadic_truncation(cfg.continuity_depth)
                      : c.r.truncate_left(cfg.continuity_depth - c.r.window_lo());
      const double din = taxicab_dist(rm, limit);
      const double dout = taxicab_dist(rule.apply(rm), rule.apply(limit));
      if (dout > std::max(thr, 16.0 * din))
        return violated(dout, "image sequence does not follow a vanishing input sequence");
      return {};
    }
  }
  return {};
}

}  // namespace

const char* outcome_name(Outcome o) {
  switch (o) {
    case Outcome::kPass:
      return "pass";
    case Outcome::kFail:
      return "fail";
    case Outcome::kPreconditionUnmet:
      return "precondition-unmet";
  }
  return "unknown";
}

const char* probe_outcome_name(ProbeOutcome o) {
  switch (o) {
    case ProbeOutcome::kCertifiedPass:
      return "certified-pass";
    case ProbeOutcome::kCertifiedFail:
      return "certified-fail";
    case ProbeOutcome::kInconclusive:
      return "inconclusive";
  }
  return "unknown";
}

const std::vector<std::string>& axiom_names() { return kAxiomNames; }

std::vector<Stream> Battery::fixtures() {
  const Stream two_sided(0, {1.0}, GeometricTail{1.0, 0.5}, GeometricTail{0.5, 0.5});
  return {
      Stream::basis(0),
      Stream::basis(1),
      Stream::basis(-3),
      Stream(0, {6.0, 3.0}),
      Stream(0, {2.0, 1.0}),
      dyadic_limit(),
      Stream(-2, {3.0, 0.0, 1.0, 4.0}, GeometricTail{2.0, 0.5}, GeometricTail{1.0, 0.25}),
      two_sided,
      two_sided.truncate_left(4),
      two_sided.truncate_left(16),
  };
}

std::vector<Stream> Battery::streams() const {
  std::vector<Stream> out = fixtures();
  out.reserve(out.size() + count);
  for (std::size_t k = 0; k < count; ++k) {
    std::mt19937_64 gen(splitmix64(seed + 0x1000u * (k + 1)));
    const index_t len = 1 + static_cast<index_t>(gen() % static_cast<std::uint64_t>(max_window_len));
    const index_t lo = static_cast<index_t>(gen() % 65) - 32;
    std::vector<double> vals;
    for (index_t i = 0; i < len; ++i) {
      const double u = uniform01(gen);
      vals.push_back(u < 0.15 ? 0.0 : max_value * uniform01(gen));
    }
    auto tail = [&]() {
      return GeometricTail{0.01 + 5.0 * uniform01(gen), max_ratio * uniform01(gen)};
    };
    std::optional<GeometricTail> left, right;
    switch (gen() % 4) {
      case 2:
        right = tail();
        break;
      case 3:
        left = tail();
        right = tail();
        break;
      default:
        break;
    }
    out.emplace_back(lo, std::move(vals), left, right);
  }
  return out;
}

AxiomVerdict check_axiom(const Rule& rule, const std::string& axiom, const Battery& battery,
                         const CheckConfig& cfg) {
  const std::optional<AxiomId> id = axiom_from_name(axiom);
  if (!id) throw std::invalid_argument("check_axiom: unknown axiom " + axiom);
  const std::vector<Stream> streams = battery.streams();
  const std::vector<CaseSpec> cases = make_cases(*id, streams, battery, cfg);
  std::vector<CaseResult> results(cases.size());
  run_indexed(cases.size(), cfg.parallel,
              [&](std::size_t k) { results[k] = evaluate_case(rule, *id, cases[k], cfg); });

  AxiomVerdict v;
  v.axiom = axiom;
  v.battery_seed = battery.seed;
  v.battery_size = streams.size();
  v.cases_evaluated = cases.size();
  for (std::size_t k = 0; k < results.size(); ++k) {
    if (results[k].status == CaseResult::kUnmet) ++v.cases_precondition_unmet;
    if (results[k].status == CaseResult::kViolated && v.outcome != Outcome::kFail) {
      v.outcome = Outcome::kFail;
      v.witness = Witness{cases[k], results[k].violation, results[k].note};
    }
  }
  if (v.outcome != Outcome::kFail && !cases.empty() &&
      v.cases_precondition_unmet == cases.size())
    v.outcome = Outcome::kPreconditionUnmet;
  return v;
}

double replay_violation(const Rule& rule, const std::string& axiom, const CaseSpec& spec,
                        const CheckConfig& cfg) {
  const std::optional<AxiomId> id = axiom_from_name(axiom);
  if (!id) throw std::invalid_argument("replay_violation: unknown axiom " + axiom);
  return evaluate_case(rule, *id, spec, cfg).violation;
}

double lipschitz_certificate(const Rule& rule, const Battery& battery, bool parallel) {
  const std::vector<Stream> ss = battery.streams();
  const std::size_t n = ss.size() / 2;
  std::vector<double> ratios(n, 0.0);
  run_indexed(n, parallel, [&](std::size_t k) {
    const Stream& a = ss[2 * k];
    const Stream& b = ss[2 * k + 1];
    const double din = taxicab_dist(a, b);
    if (din <= 0.0) return;
    ratios[k] = taxicab_dist(rule.apply(a), rule.apply(b)) / din;
  });
  double best = 0.0;
  for (double x : ratios) best = std::max(best, x);
  return best;
}

namespace {

// Indices where a full-retention rate might sit below i are scanned
// explicitly down to the pure left-tail region, which is decided in closed
// form by its spec.
bool left_kind_has_unit(const TailSpec& t) {
  switch (t.kind) {
    case TailSpec::Kind::kConstant:
      return t.constant_value == 1.0;
    case TailSpec::Kind::kPeriodic:
      return std::find(t.pattern.begin(), t.pattern.end(), 1.0) != t.pattern.end();
    case TailSpec::Kind::kFormula:
      return t.formula_id == FormulaId::kVennBlocks;
  }
  return false;
}

bool unit_strictly_below(const LambdaProfile& p, index_t i) {
  if (left_kind_has_unit(p.left_tail())) return true;
  const index_t pattern_span =
      p.left_tail().kind == TailSpec::Kind::kPeriodic
          ? static_cast<index_t>(p.left_tail().pattern.size())
          : 1;
  const index_t scan_lo = p.window_lo() - 2 * pattern_span - 8;
  for (index_t j = scan_lo; j < i; ++j)
    if (p.lambda_at(j) == 1.0) return true;
  return false;
}

}  // namespace

ProbeReport sup_continuity_probe(const LambdaProfile& p, index_t depth, const Battery& battery,
                                 double tolerance) {
  ProbeReport rep;
  const FamilyReport fam = p.classify();
  if (fam.in_T) {
    const double bound = fam.sup_s.value();
    const GeometricRule rule(p);
    const std::vector<Stream> ss = battery.streams();
    for (std::size_t k = 0; k + 1 < ss.size(); k += 2) {
      const double ds = sup_dist(ss[k], ss[k + 1]);
      const double dphi = sup_dist(rule.apply(ss[k]), rule.apply(ss[k + 1]));
      if (dphi > bound * ds + tolerance * (1.0 + ds)) {
        rep.outcome = ProbeOutcome::kInconclusive;
        rep.note = "bounded unit responses, but a battery pair escapes the certified bound";
        rep.bound = bound;
        return rep;
      }
    }
    rep.outcome = ProbeOutcome::kCertifiedPass;
    rep.bound = bound;
    rep.note = "unit responses are uniformly bounded; the bound holds on all battery pairs";
    return rep;
  }

  // Unit responses are unbounded: hunt for a block index whose downward
  // share sums reach the requested depth, then shrink block streams on it.
  const index_t lo_h = std::min(p.window_lo(), static_cast<index_t>(0)) - 64;
  const index_t hi_h = std::max(p.window_hi(), static_cast<index_t>(0)) + 4096;
  constexpr index_t kWalkCap = 200000;
  index_t istar = 0;
  bool found = false;
  for (index_t i = lo_h; i <= hi_h && !found; ++i) {
    const double lam = p.lambda_at(i);
    if (lam <= 0.0) continue;
    double acc = 0.0, P = 1.0;
    for (index_t j = i; i - j < kWalkCap; --j) {
      acc += P;
      if (lam * acc >= static_cast<double>(depth)) {
        istar = i;
        found = true;
        break;
      }
      P *= 1.0 - p.lambda_at(j - 1);
      if (P == 0.0) break;
    }
  }
  if (!found) {
    rep.outcome = ProbeOutcome::kInconclusive;
    rep.note = "unit responses unbounded, but no witness block found within the horizon";
    return rep;
  }

  const double lam = p.lambda_at(istar);
  std::vector<index_t> block_lo(static_cast<std::size_t>(depth) + 1, istar + 1);
  {
    double acc = 0.0, P = 1.0;
    index_t m = 1;
    for (index_t j = istar; m <= depth && istar - j < kWalkCap; --j) {
      acc += P;
      while (m <= depth && lam * acc >= static_cast<double>(m)) {
        block_lo[static_cast<std::size_t>(m)] = j;
        ++m;
      }
      P *= 1.0 - p.lambda_at(j - 1);
      if (P == 0.0) break;
    }
  }
  for (index_t m = 1; m <= depth; ++m) {
    const index_t jm = block_lo[static_cast<std::size_t>(m)];
    if (jm > istar) {
      rep.outcome = ProbeOutcome::kInconclusive;
      rep.note = "witness block shorter than requested depth";
      return rep;
    }
    const Stream rm(jm, std::vector<double>(static_cast<std::size_t>(istar - jm + 1),
                                            1.0 / static_cast<double>(m)));
    const double phi = allocate_direct(p, rm, istar);
    if (phi < 1.0 - tolerance) {
      rep.outcome = ProbeOutcome::kInconclusive;
      rep.note = "block stream failed to reproduce the claimed allocation";
      return rep;
    }
    rep.witness_values.push_back(phi);
    rep.witness_stream = rm;
  }
  rep.outcome = ProbeOutcome::kCertifiedFail;
  rep.note = "block streams vanish in sup norm while one allocation stays at or above 1";
  return rep;
}

ProbeReport pointwise_continuity_probe(const LambdaProfile& p, index_t depth,
                                       double tolerance) {
  ProbeReport rep;
  double uval = 0.0;
  if (p.is_uniform(&uval) && uval == 0.0) {
    rep.outcome = ProbeOutcome::kCertifiedPass;
    rep.note = "every allocation is zero; trivially continuous";
    return rep;
  }
  const FamilyReport fam = p.classify();
  if (fam.in_P) {
    // Full-retention indices sit below every index, so each allocation
    // depends on finitely many incomes; verify the cutoff is exact.
    const std::vector<index_t> probes = {p.window_lo() - 17, p.window_lo(), p.window_hi() + 9};
    for (index_t i : probes) {
      index_t unit = i;
      bool have_unit = false;
      for (index_t j = i - 1; i - j < 8192; --j)
        if (p.lambda_at(j) == 1.0) {
          unit = j;
          have_unit = true;
          break;
        }
      if (!have_unit) {
        rep.outcome = ProbeOutcome::kInconclusive;
        rep.note = "no full-retention index found below a probe within the horizon";
        return rep;
      }
      const Stream base = Stream::basis(i);
      for (index_t shift : {1, 5}) {
        const Stream bumped = base.with_value(unit - shift, 1e6);
        if (allocate_direct(p, bumped, i) != allocate_direct(p, base, i)) {
          rep.outcome = ProbeOutcome::kInconclusive;
          rep.note = "finite-dependency cutoff failed to hold exactly";
          return rep;
        }
      }
    }
    rep.outcome = ProbeOutcome::kCertifiedPass;
    rep.note = "allocations depend on finitely many past incomes below every index";
    return rep;
  }

  // Neither trivial nor finitely dependent: a spike pushed ever deeper keeps
  // the allocation at the retention rate while vanishing coordinate-wise.
  const index_t pattern_span =
      p.left_tail().kind == TailSpec::Kind::kPeriodic
          ? static_cast<index_t>(p.left_tail().pattern.size())
          : 1;
  const index_t lo_h = p.window_lo() - 2 * pattern_span - 64;
  const index_t hi_h = std::max(p.window_hi(), static_cast<index_t>(0)) + 128;
  index_t istar = 0;
  bool found = false;
  for (index_t i = lo_h; i <= hi_h && !found; ++i) {
    if (p.lambda_at(i) > 0.0 && !unit_strictly_below(p, i)) {
      istar = i;
      found = true;
    }
  }
  if (!found) {
    rep.outcome = ProbeOutcome::kInconclusive;
    rep.note = "no spike index with unit-free history found within the horizon";
    return rep;
  }
  const double lam = p.lambda_at(istar);
  for (index_t m = 1; m <= depth; ++m) {
    const double prod = p.partial_product(istar - m, istar - 1);
    if (prod < 1e-280) {
      rep.note = "spike depth limited by floating range";
      break;
    }
    const Stream rm(istar - m, {1.0 / prod});
    const double phi = allocate_direct(p, rm, istar);
    if (std::abs(phi - lam) > tolerance * std::max(1.0, lam)) {
      rep.outcome = ProbeOutcome::kInconclusive;
      rep.note = "spike failed to reproduce the retention rate";
      return rep;
    }
    rep.witness_values.push_back(phi);
    rep.witness_stream = rm;
  }
  if (rep.witness_values.empty()) {
    rep.outcome = ProbeOutcome::kInconclusive;
    return rep;
  }
  rep.outcome = ProbeOutcome::kCertifiedFail;
  rep.bound = lam;
  rep.note = "spikes vanish coordinate-wise while the allocation stays at the retention rate";
  return rep;
}

ProbeReport taxicab_continuity_probe(const Rule& rule, index_t depth, const Battery& battery,
                                     double tolerance) {
  ProbeReport rep;
  const Stream limit = dyadic_limit();
  const Stream limit_phi = rule.apply(limit);
  for (index_t m : {std::max<index_t>(depth / 4, 2), std::max<index_t>(depth / 2, 3), depth}) {
    const Stream rm = dyadic_truncation(m);
    const double din = taxicab_dist(rm, limit);
    const double dout = taxicab_dist(rule.apply(rm), limit_phi);
    rep.witness_values.push_back(dout);
    if (dout > std::max(tolerance, 16.0 * din)) {
      rep.outcome = ProbeOutcome::kCertifiedFail;
      rep.note = "the image of a norm-converging truncation sequence stays away from the "
                 "image of its limit";
      rep.witness_stream = rm;
      return rep;
    }
  }
  for (const Stream& s : battery.streams()) {
    if (!s.has_left_mass()) continue;
    const Stream rm = s.truncate_left(depth - s.window_lo());
    const double din = taxicab_dist(rm, s);
    const double dout = taxicab_dist(rule.apply(rm), rule.apply(s));
    if (dout > std::max(threshold(tolerance, s), 16.0 * din)) {
      rep.outcome = ProbeOutcome::kCertifiedFail;
      rep.note = "the image of a norm-converging truncation sequence stays away from the "
                 "image of its limit";
      rep.witness_stream = rm;
      return rep;
    }
  }
  const double contraction = lipschitz_certificate(rule, battery, true);
  rep.bound = contraction;
  if (contraction <= 1.0 + tolerance) {
    rep.outcome = ProbeOutcome::kCertifiedPass;
    rep.note = "non-expansive on all battery pairs; truncation sequences follow their limits";
  } else {
    rep.outcome = ProbeOutcome::kInconclusive;
    rep.note = "truncation sequences follow their limits at this depth, but no contraction "
               "certificate holds";
  }
  return rep;
}

}  // namespace geotransfer
