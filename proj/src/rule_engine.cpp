#include "geotransfer/rule_engine.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>

namespace geotransfer {
namespace {

// Mass a synthesized output stream may shed relative to the input scale.
constexpr double kDropTolerance = 1e-12;
constexpr index_t kExtendChunk = 256;
constexpr index_t kExtendCap = 1 << 16;

double problem_scale(const Stream& r) { return std::max(1.0, r.taxicab_norm()); }

// sum_{j >= from} r_j * tail_product_limit(j)
double income_times_tailprod(const LambdaProfile& p, const Stream& r, index_t from) {
  const index_t past_windows = std::max(r.window_hi(), p.window_hi()) + 1;
  const index_t mixed_hi = std::max(from, past_windows);
  double acc = 0.0;
  if (from < mixed_hi) {
    double tp = p.tail_product_limit(mixed_hi);
    for (index_t j = mixed_hi - 1; j >= from; --j) {
      tp *= 1.0 - p.lambda_at(j);
      acc += r.value_at(j) * tp;
    }
  }
  // Beyond mixed_hi both the profile and the stream run on their tails. In
  // that regime the limit products either all vanish or never do, so one
  // probe decides whether the region contributes.
  if (r.right_tail() && p.tail_product_limit(mixed_hi) > 0.0) {
    const GeometricTail tail = *r.right_tail();
    const index_t base = r.window_hi();
    const double q = tail.ratio;
    for (index_t j = mixed_hi;; ++j) {
      const double rj = tail.value_at_offset(j - base);
      if (rj <= 0.0) break;
      if (rj / (1.0 - q) <= 1e-18 * (1.0 + acc)) break;
      acc += rj * p.tail_product_limit(j);
    }
  }
  return acc;
}

struct BeyondSummary {
  double income_sum = 0.0;       // sum_{j > hi} r_j
  double leaked = 0.0;           // mass vanishing past hi, given the residual
  double tail_allocation = 0.0;  // allocations past hi
};

BeyondSummary beyond_window(const LambdaProfile& p, const Stream& r, index_t hi,
                            double residual) {
  BeyondSummary s;
  s.income_sum = r.taxicab_norm() - r.mass_below(hi + 1);
  s.leaked = residual * p.tail_product_limit(hi + 1) + income_times_tailprod(p, r, hi + 1);
  s.tail_allocation = std::max(0.0, s.income_sum + residual - s.leaked);
  return s;
}

}  // namespace

double incoming_transfer(const LambdaProfile& p, const Stream& r, index_t i) {
  ExtReal t = p.weighted_left_sum(i - 1, i, &r);
  if (!t.is_finite())
    throw std::domain_error("incoming_transfer: left contribution diverged");
  return t.value();
}

AllocationResult allocate(const LambdaProfile& p, const Stream& r, index_t window_lo,
                          index_t window_hi) {
  if (window_hi < window_lo) throw std::invalid_argument("allocate: empty window");
  const index_t carried_hi = std::min(window_lo, r.window_hi() + 1);
  for (index_t j = r.window_lo(); j < carried_hi; ++j)
    if (r.value_at(j) > 0.0)
      throw std::invalid_argument("allocate: window starts above carried income");

  AllocationResult out;
  out.window_lo = window_lo;
  out.allocations.resize(static_cast<std::size_t>(window_hi - window_lo + 1));
  double t = incoming_transfer(p, r, window_lo);
  for (index_t i = window_lo; i <= window_hi; ++i) {
    const double s = r.value_at(i) + t;
    const double lam = p.lambda_at(i);
    out.allocations[static_cast<std::size_t>(i - window_lo)] = lam * s;
    t = (1.0 - lam) * s;
  }
  out.residual_transfer = t;
  const BeyondSummary b = beyond_window(p, r, window_hi, t);
  out.leaked_mass = b.leaked;
  out.tail_allocation_sum = b.tail_allocation;
  return out;
}

double allocate_direct(const LambdaProfile& p, const Stream& r, index_t i) {
  const double lam = p.lambda_at(i);
  if (lam == 0.0) return 0.0;
  double acc = r.value_at(i);
  double P = 1.0;
  index_t j = i;
  while (i - j < 2000000) {
    --j;
    P *= 1.0 - p.lambda_at(j);
    if (P == 0.0) break;
    acc += P * r.value_at(j);
    if (j <= r.window_lo() && P * r.mass_below(j) <= 1e-15 * (1.0 + acc)) break;
  }
  return lam * acc;
}

double total_allocated(const LambdaProfile& p, const Stream& r) {
  const index_t lo = r.window_lo();
  double unallocated = income_times_tailprod(p, r, lo);
  if (r.left_tail()) {
    const double tp = p.tail_product_limit(lo);
    if (tp > 0.0) unallocated += tp * p.weighted_left_sum(lo - 1, lo, &r).value();
  }
  return std::max(0.0, r.taxicab_norm() - unallocated);
}

double total_below(const LambdaProfile& p, const Stream& r, index_t j) {
  return std::max(0.0, r.mass_below(j) - incoming_transfer(p, r, j));
}

double Rule::residual_below(const Stream& r, index_t j) const {
  const Stream phi = apply(r);
  return r.mass_below(j) - phi.mass_below(j);
}

GeometricRule::GeometricRule(LambdaProfile profile, std::string label)
    : profile_(std::move(profile)), label_(std::move(label)) {}

double GeometricRule::residual_below(const Stream& r, index_t j) const {
  return incoming_transfer(profile_, r, j);
}

Stream GeometricRule::apply(const Stream& r) const {
  if (r.is_zero()) return Stream::zero();
  const LambdaProfile& p = profile_;
  const double tol = kDropTolerance * problem_scale(r);

  // Left edge. Without a left income tail the output vanishes below the
  // first supported index. With one, a constant retention rate makes the
  // deep output an exact geometric tail; any other shape is materialized
  // downward until the mass still below is negligible.
  index_t out_lo = r.window_lo();
  std::optional<GeometricTail> out_left;
  if (!r.left_tail()) {
    out_lo = r.support_lo().value_or(r.window_lo());
  } else {
    const index_t deep = std::min(r.window_lo(), p.window_lo());
    out_lo = deep;
    if (p.left_tail().kind == TailSpec::Kind::kConstant) {
      const double c = p.left_tail().constant_value;
      if (c > 0.0) {
        const GeometricTail in = r.left_tail()->reanchored(r.window_lo() - deep);
        const double a = in.coefficient;
        const double q = in.ratio;
        const double carried = (1.0 - c) * a / (1.0 - (1.0 - c) * q);
        const double first = c * (a + carried * q);
        if (first > 0.0) out_left = GeometricTail{first, q};
      }
    } else {
      index_t extended = 0;
      while (total_below(p, r, out_lo) > tol) {
        out_lo -= kExtendChunk;
        extended += kExtendChunk;
        if (extended > kExtendCap)
          throw std::domain_error("apply: left output not representable within tolerance");
      }
    }
  }

  const index_t mixed_hi = std::max({r.window_hi(), p.window_hi(), out_lo});
  AllocationResult base = allocate(p, r, out_lo, mixed_hi);
  std::vector<double> vals = std::move(base.allocations);
  double t = base.residual_transfer;

  // Right edge. Beyond mixed_hi the profile runs on its right tail spec and
  // the income on its geometric tail, if any.
  std::optional<GeometricTail> out_right;
  const bool income_beyond =
      r.right_tail().has_value() && r.value_at(mixed_hi + 1) > 0.0;
  const TailSpec& rk = p.right_tail();

  if (rk.kind == TailSpec::Kind::kConstant && rk.constant_value == 0.0) {
    // full retention beyond: nothing is ever allocated there
  } else if (rk.kind == TailSpec::Kind::kConstant && !income_beyond) {
    const double c = rk.constant_value;
    const double first = c * t;
    if (first > 0.0) out_right = GeometricTail{first, 1.0 - c};
  } else if (rk.kind == TailSpec::Kind::kConstant && income_beyond &&
             r.right_tail()->ratio != 1.0 - rk.constant_value) {
    // Two decay modes: the income's ratio q and the retention ratio 1-c.
    // t_{mixed_hi+1+k} = A (1-c)^k + B q^k, so the output splits the same
    // way; keep the slower mode as the tail once the faster one is spent.
    const double c = rk.constant_value;
    const double a = r.value_at(mixed_hi + 1);
    const double q = r.right_tail()->ratio;
    const double B = (1.0 - c) * a / (q - (1.0 - c));
    const double A = t - B;
    double u_slow = c * (a + B), rho_slow = q;
    double u_fast = c * A, rho_fast = 1.0 - c;
    if (rho_fast > rho_slow) {
      std::swap(u_slow, u_fast);
      std::swap(rho_slow, rho_fast);
    }
    index_t extend = 0;
    double rem_fast = std::abs(u_fast) / (1.0 - rho_fast);
    while (rem_fast > tol) {
      rem_fast *= rho_fast;
      if (++extend > kExtendCap)
        throw std::domain_error("apply: right output not representable within tolerance");
    }
    double head = u_slow * std::pow(rho_slow, static_cast<double>(extend));
    if (head <= 0.0) {
      double rem_slow = std::abs(head) / (1.0 - rho_slow);
      while (rem_slow > tol) {
        rem_slow *= rho_slow;
        if (++extend > kExtendCap)
          throw std::domain_error("apply: right output not representable within tolerance");
      }
    } else {
      out_right = GeometricTail{head, rho_slow};
    }
    for (index_t k = 0; k < extend; ++k) {
      const index_t i = mixed_hi + 1 + k;
      const double s = r.value_at(i) + t;
      vals.push_back(rk.constant_value * s);
      t = (1.0 - rk.constant_value) * s;
    }
  } else {
    // Equal-rate degenerate case, periodic and formula tails: extend until
    // everything still owed past the window fits under the tolerance.
    index_t hi = mixed_hi;
    while (true) {
      const BeyondSummary b = beyond_window(p, r, hi, t);
      if (b.tail_allocation <= tol) break;
      if (hi - mixed_hi >= kExtendCap)
        throw std::domain_error("apply: right output not representable within tolerance");
      for (index_t k = 0; k < kExtendChunk; ++k) {
        ++hi;
        const double s = r.value_at(hi) + t;
        const double lam = p.lambda_at(hi);
        vals.push_back(lam * s);
        t = (1.0 - lam) * s;
      }
    }
  }

  return Stream(out_lo, std::move(vals), out_left, out_right);
}

Stream consistency_transform(const Rule& rule, const Stream& r, index_t j) {
  double res = rule.residual_below(r, j);
  // Folding carries the unallocated leftover forward; a rule that overdraws
  // the past leaves nothing meaningful to fold, so that pivot is outside the
  // transform's domain rather than a comparison that could fail.
  if (res < 0.0) {
    if (res < -1e-9 * problem_scale(r))
      throw std::domain_error("consistency_transform: past is overdrawn at the pivot");
    res = 0.0;
  }
  double v = r.value_at(j) + res;
  if (v < 0.0) {
    if (v < -1e-9 * problem_scale(r))
      throw std::domain_error("consistency_transform: negative folded balance at the pivot");
    v = 0.0;
  }
  Stream upper = r.truncate_left(-(j + 1));
  return upper.with_value(j, v);
}

LambdaRecovery recover_lambda(const Rule& rule, index_t lo, index_t hi) {
  LambdaRecovery rec;
  for (index_t i = lo; i <= hi; ++i) {
    const double v = rule.apply(Stream::basis(i)).value_at(i);
    if (!(v >= 0.0 && v <= 1.0)) rec.feasible = false;
    rec.values.push_back(v);
  }
  return rec;
}

}  // namespace geotransfer
