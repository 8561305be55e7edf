#include "geotransfer/lambda_profile.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace geotransfer {

namespace {

bool is_rate(double v) { return std::isfinite(v) && v >= 0.0 && v <= 1.0; }

double pow2(index_t e) {
  // 2^e for e <= 0, flushing to zero past the denormal range
  if (e < -1074) return 0.0;
  return std::ldexp(1.0, static_cast<int>(e));
}

bool is_pronic(index_t i) {
  if (i < 0) return false;
  index_t n =
      static_cast<index_t>((std::sqrt(4.0 * static_cast<double>(i) + 1.0) - 1.0) / 2.0);
  for (index_t m = std::max<index_t>(0, n - 1); m <= n + 1; ++m)
    if (m * (m + 1) == i) return true;
  return false;
}

index_t next_pronic(index_t i) {
  index_t from = std::max<index_t>(i, 0);
  index_t n =
      static_cast<index_t>((std::sqrt(4.0 * static_cast<double>(from) + 1.0) - 1.0) / 2.0);
  n = std::max<index_t>(0, n - 2);
  while (n * (n + 1) < from) ++n;
  return n * (n + 1);
}

double pattern_product(const std::vector<double>& pattern) {
  double rho = 1.0;
  for (double v : pattern) rho *= 1.0 - v;
  return rho;
}

// prod_{k=a}^{b} (1 - lambda_k) for a segment lying entirely in the region
// governed by this tail spec
double tail_segment_product(const TailSpec& t, index_t a, index_t b) {
  if (a > b) return 1.0;
  switch (t.kind) {
    case TailSpec::Kind::kConstant: {
      const double c = t.constant_value;
      if (c == 0.0) return 1.0;
      if (c == 1.0) return 0.0;
      return std::pow(1.0 - c, static_cast<double>(b - a + 1));
    }
    case TailSpec::Kind::kPeriodic: {
      const index_t L = static_cast<index_t>(t.pattern.size());
      const double rho = pattern_product(t.pattern);
      const index_t count = b - a + 1;
      const index_t full = count / L;
      double prod;
      if (full == 0)
        prod = 1.0;
      else if (rho == 0.0)
        return 0.0;
      else
        prod = std::pow(rho, static_cast<double>(full));
      for (index_t k = a + full * L; k <= b; ++k) {
        prod *= 1.0 - t.pattern[static_cast<std::size_t>(floor_mod(k, L))];
        if (prod == 0.0) return 0.0;
      }
      return prod;
    }
    case TailSpec::Kind::kFormula:
      if (t.formula_id == FormulaId::kExample1Decay) {
        const index_t a2 = std::max<index_t>(a, 1);
        if (a2 > b) return 1.0;
        // prod exp(-2^-k) over [a2, b] = exp(-(2^{1-a2} - 2^{-b}))
        return std::exp(-(pow2(1 - a2) - pow2(-b)));
      }
      // venn blocks: any negative index or pronic in range zeroes the product
      if (a < 0) return 0.0;
      return next_pronic(a) <= b ? 0.0 : 1.0;
  }
  throw std::logic_error("tail_segment_product: bad kind");
}

// prod_{k=K}^{inf} (1 - lambda_k) for a region governed by this tail spec
double tail_limit_product(const TailSpec& t, index_t K) {
  switch (t.kind) {
    case TailSpec::Kind::kConstant:
      return t.constant_value > 0.0 ? 0.0 : 1.0;
    case TailSpec::Kind::kPeriodic:
      return pattern_product(t.pattern) < 1.0 ? 0.0 : 1.0;
    case TailSpec::Kind::kFormula:
      if (t.formula_id == FormulaId::kExample1Decay)
        return std::exp(-pow2(1 - std::max<index_t>(K, 1)));
      return 0.0;  // venn blocks: a pronic always lies ahead
  }
  throw std::logic_error("tail_limit_product: bad kind");
}

double side_inf_lambda(const TailSpec& t, bool left_side, index_t boundary) {
  switch (t.kind) {
    case TailSpec::Kind::kConstant:
      return t.constant_value;
    case TailSpec::Kind::kPeriodic:
      return *std::min_element(t.pattern.begin(), t.pattern.end());
    case TailSpec::Kind::kFormula:
      if (t.formula_id == FormulaId::kExample1Decay) return 0.0;
      // venn blocks: the left region is all units only when it stays below 1
      if (left_side) return boundary <= 1 ? 1.0 : 0.0;
      return 0.0;
  }
  throw std::logic_error("side_inf_lambda: bad kind");
}

bool side_has_units(const TailSpec& t) {
  switch (t.kind) {
    case TailSpec::Kind::kConstant:
      return t.constant_value == 1.0;
    case TailSpec::Kind::kPeriodic:
      return std::any_of(t.pattern.begin(), t.pattern.end(),
                         [](double v) { return v == 1.0; });
    case TailSpec::Kind::kFormula:
      return t.formula_id == FormulaId::kVennBlocks;
  }
  throw std::logic_error("side_has_units: bad kind");
}

std::optional<double> side_constant(const TailSpec& t) {
  switch (t.kind) {
    case TailSpec::Kind::kConstant:
      return t.constant_value;
    case TailSpec::Kind::kPeriodic: {
      const double first = t.pattern.front();
      for (double v : t.pattern)
        if (v != first) return std::nullopt;
      return first;
    }
    case TailSpec::Kind::kFormula:
      return std::nullopt;
  }
  throw std::logic_error("side_constant: bad kind");
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(15);
  os << v;
  return os.str();
}

}  // namespace

double formula_lambda(FormulaId id, index_t i) {
  switch (id) {
    case FormulaId::kExample1Decay:
      if (i < 1) return 0.0;
      return -std::expm1(-pow2(-i));
    case FormulaId::kVennBlocks:
      return (i < 0 || is_pronic(i)) ? 1.0 : 0.0;
  }
  throw std::logic_error("formula_lambda: bad id");
}

const char* formula_name(FormulaId id) {
  switch (id) {
    case FormulaId::kExample1Decay:
      return "example1";
    case FormulaId::kVennBlocks:
      return "venn_blocks";
  }
  throw std::logic_error("formula_name: bad id");
}

std::optional<FormulaId> formula_from_name(const std::string& name) {
  if (name == "example1") return FormulaId::kExample1Decay;
  if (name == "venn_blocks") return FormulaId::kVennBlocks;
  return std::nullopt;
}

TailSpec TailSpec::constant(double c) {
  if (!is_rate(c)) throw std::invalid_argument("TailSpec: constant must lie in [0, 1]");
  TailSpec t;
  t.kind = Kind::kConstant;
  t.constant_value = c;
  return t;
}

TailSpec TailSpec::periodic(std::vector<double> pattern) {
  if (pattern.empty()) throw std::invalid_argument("TailSpec: pattern must be nonempty");
  for (double v : pattern)
    if (!is_rate(v)) throw std::invalid_argument("TailSpec: pattern values must lie in [0, 1]");
  TailSpec t;
  t.kind = Kind::kPeriodic;
  t.pattern = std::move(pattern);
  return t;
}

TailSpec TailSpec::formula(FormulaId id) {
  TailSpec t;
  t.kind = Kind::kFormula;
  t.formula_id = id;
  return t;
}

LambdaProfile::LambdaProfile(index_t window_lo, std::vector<double> values, TailSpec left_tail,
                             TailSpec right_tail)
    : window_lo_(window_lo),
      values_(std::move(values)),
      left_(std::move(left_tail)),
      right_(std::move(right_tail)) {
  for (double v : values_)
    if (!is_rate(v))
      throw std::invalid_argument("LambdaProfile: window values must lie in [0, 1]");
}

LambdaProfile LambdaProfile::uniform(double c) {
  return LambdaProfile(0, {}, TailSpec::constant(c), TailSpec::constant(c));
}

double LambdaProfile::lambda_at(index_t i) const {
  if (i >= window_lo_ && i <= window_hi())
    return values_[static_cast<std::size_t>(i - window_lo_)];
  const TailSpec& t = (i < window_lo_) ? left_ : right_;
  switch (t.kind) {
    case TailSpec::Kind::kConstant:
      return t.constant_value;
    case TailSpec::Kind::kPeriodic:
      return t.pattern[static_cast<std::size_t>(
          floor_mod(i, static_cast<index_t>(t.pattern.size())))];
    case TailSpec::Kind::kFormula:
      return formula_lambda(t.formula_id, i);
  }
  throw std::logic_error("lambda_at: bad kind");
}

double LambdaProfile::partial_product(index_t i, index_t j) const {
  if (j < i - 1) throw std::invalid_argument("partial_product: range end before start - 1");
  if (j == i - 1) return 1.0;
  double prod = 1.0;
  if (i < window_lo_) {
    prod *= tail_segment_product(left_, i, std::min(j, window_lo_ - 1));
    if (prod == 0.0) return 0.0;
  }
  for (index_t k = std::max(i, window_lo_); k <= std::min(j, window_hi()); ++k) {
    prod *= 1.0 - values_[static_cast<std::size_t>(k - window_lo_)];
    if (prod == 0.0) return 0.0;
  }
  if (j > window_hi())
    prod *= tail_segment_product(right_, std::max(i, window_hi() + 1), j);
  return prod;
}

double LambdaProfile::tail_product_limit(index_t i) const {
  const double head = partial_product(i, std::max(i - 1, window_hi()));
  if (head == 0.0) return 0.0;
  return head * tail_limit_product(right_, std::max(i, window_hi() + 1));
}

ExtReal LambdaProfile::weighted_left_sum(index_t top, index_t base, const Stream* w) const {
  if (top > base)
    throw std::invalid_argument("weighted_left_sum: top index beyond product base");
  index_t floor_idx = window_lo_;
  if (w) floor_idx = std::min(floor_idx, w->window_lo());
  if (left_.kind == TailSpec::Kind::kFormula) {
    floor_idx = std::min<index_t>(floor_idx, 0);
    // venn blocks terminate by hitting a unit, so the walk must start
    if (left_.formula_id == FormulaId::kVennBlocks) floor_idx = std::min(floor_idx, top);
  }

  double P = partial_product(top, base - 1);
  double acc = 0.0;
  index_t j = top;
  for (; j >= floor_idx; --j) {
    if (P == 0.0) return ExtReal(acc);
    acc += P * (w ? w->value_at(j) : 1.0);
    P *= 1.0 - lambda_at(j - 1);
  }
  if (P == 0.0) return ExtReal(acc);
  if (w && !w->left_tail()) return ExtReal(acc);  // no weight mass remains

  // From here down both the retention values and the weights follow their
  // tail laws, so the remainder has a closed form.
  switch (left_.kind) {
    case TailSpec::Kind::kConstant: {
      const double c = left_.constant_value;
      if (!w) {
        if (c == 0.0) return ExtReal::infinity();
        return ExtReal(acc + P / c);
      }
      const double q = w->left_tail()->ratio;
      const double first = w->value_at(j);
      return ExtReal(acc + P * first / (1.0 - (1.0 - c) * q));
    }
    case TailSpec::Kind::kPeriodic: {
      const index_t L = static_cast<index_t>(left_.pattern.size());
      const double rho = pattern_product(left_.pattern);
      double t1 = 0.0;
      double Pd = P;
      for (index_t d = 0; d < L; ++d) {
        t1 += Pd * (w ? w->value_at(j - d) : 1.0);
        Pd *= 1.0 - lambda_at(j - d - 1);
      }
      const double qL =
          w ? std::pow(w->left_tail()->ratio, static_cast<double>(L)) : 1.0;
      const double factor = rho * qL;
      if (factor >= 1.0) return t1 == 0.0 ? ExtReal(acc) : ExtReal::infinity();
      return ExtReal(acc + t1 / (1.0 - factor));
    }
    case TailSpec::Kind::kFormula:
      if (left_.formula_id == FormulaId::kExample1Decay) {
        // retention is total at and below 0, so P stays fixed on the descent
        if (!w) return ExtReal::infinity();
        return ExtReal(acc + P * w->mass_below(j + 1));
      }
      // venn blocks: the descent crosses a unit at or below 0 first
      throw std::logic_error("weighted_left_sum: venn descent must terminate explicitly");
  }
  throw std::logic_error("weighted_left_sum: bad kind");
}

ExtReal LambdaProfile::s_value(index_t i) const {
  const double li = lambda_at(i);
  if (li == 0.0) return ExtReal(0.0);
  return weighted_left_sum(i, i, nullptr).scaled_by(li);
}

ExtReal LambdaProfile::sup_s() const {
  ExtReal sup(0.0);
  auto consider = [&sup](ExtReal v) { sup = ExtReal::max(sup, v); };

  const index_t lo = window_lo_;
  const index_t hi = window_hi();
  index_t left_margin = 4, right_margin = 4;
  if (left_.kind == TailSpec::Kind::kPeriodic)
    left_margin = std::max<index_t>(left_margin, 2 * static_cast<index_t>(left_.pattern.size()));
  if (right_.kind == TailSpec::Kind::kPeriodic)
    right_margin =
        std::max<index_t>(right_margin, 2 * static_cast<index_t>(right_.pattern.size()));

  for (index_t i = lo - left_margin; i <= hi + right_margin; ++i) {
    consider(s_value(i));
    if (!sup.is_finite()) return sup;
  }

  // Right of the probed range
  const index_t m0 = hi + right_margin + 1;
  switch (right_.kind) {
    case TailSpec::Kind::kConstant: {
      const double c = right_.constant_value;
      if (c > 0.0) {
        const ExtReal entry = weighted_left_sum(m0, m0, nullptr);
        if (!entry.is_finite()) return ExtReal::infinity();
        // the recurrence walks monotonically from the entry value to 1/c
        consider(ExtReal(c * entry.value()));
        consider(ExtReal(1.0));
      }
      break;
    }
    case TailSpec::Kind::kPeriodic: {
      const index_t L = static_cast<index_t>(right_.pattern.size());
      const double rho = pattern_product(right_.pattern);
      if (rho < 1.0) {
        const ExtReal entry = weighted_left_sum(m0, m0, nullptr);
        if (!entry.is_finite()) return ExtReal::infinity();
        double A = entry.value();
        double Az = 0.0;
        for (index_t d = 0; d < L; ++d) {
          const double lam = lambda_at(m0 + d);
          consider(ExtReal(lam * A));
          A = 1.0 + (1.0 - lam) * A;
          Az = 1.0 + (1.0 - lam) * Az;
        }
        // per-phase iterates move monotonically toward the limit cycle
        double Astar = Az / (1.0 - rho);
        for (index_t d = 0; d < L; ++d) {
          const double lam = lambda_at(m0 + d);
          consider(ExtReal(lam * Astar));
          Astar = 1.0 + (1.0 - lam) * Astar;
        }
      }
      break;  // rho == 1 means an all-zero pattern: S == 0 out there
    }
    case TailSpec::Kind::kFormula:
      if (right_.formula_id == FormulaId::kVennBlocks) {
        // blocks between consecutive pronic units grow without bound
        return ExtReal::infinity();
      } else {
        const ExtReal entry = weighted_left_sum(m0, m0, nullptr);
        if (!entry.is_finite()) return ExtReal::infinity();
        double A = entry.value();
        index_t i = m0;
        for (int step = 0; step < 4096; ++step) {
          const double lam = lambda_at(i);
          consider(ExtReal(lam * A));
          // beyond i: S <= 2^-(i+1) * (A + 1), decreasing in i
          const double bound = pow2(-std::max<index_t>(i + 1, -1073)) * (A + 1.0);
          if (bound <= sup.value()) break;
          A = 1.0 + (1.0 - lam) * A;
          ++i;
        }
      }
      break;
  }
  if (!sup.is_finite()) return sup;

  // Left of the probed range: responses there depend only on the left tail,
  // so they take exact steady or cyclic values.
  switch (left_.kind) {
    case TailSpec::Kind::kConstant:
      if (left_.constant_value > 0.0) consider(ExtReal(1.0));
      break;
    case TailSpec::Kind::kPeriodic: {
      const index_t L = static_cast<index_t>(left_.pattern.size());
      const double rho = pattern_product(left_.pattern);
      if (rho < 1.0) {
        const index_t am = lo - left_margin - L;
        double Az = 0.0;
        for (index_t d = 0; d < L; ++d) Az = 1.0 + (1.0 - lambda_at(am + d)) * Az;
        double Astar = Az / (1.0 - rho);
        for (index_t d = 0; d < L; ++d) {
          const double lam = lambda_at(am + d);
          consider(ExtReal(lam * Astar));
          Astar = 1.0 + (1.0 - lam) * Astar;
        }
      }
      break;
    }
    case TailSpec::Kind::kFormula:
      if (left_.formula_id == FormulaId::kExample1Decay) {
        // indices in (0, window_lo) respond unboundedly: retention vanishes
        // below them but their own rate is positive
        if (lo >= 2) return ExtReal::infinity();
      } else {
        consider(ExtReal(1.0));  // negative indices
        for (index_t n = 0;; ++n) {
          const index_t p = n * (n + 1);
          if (p >= lo) break;
          const index_t prev = (n == 0) ? -1 : (n - 1) * n;
          consider(ExtReal(static_cast<double>(p - prev)));
        }
      }
      break;
  }
  return sup;
}

bool LambdaProfile::is_uniform(double* value) const {
  const auto l = side_constant(left_);
  const auto r = side_constant(right_);
  if (!l || !r || *l != *r) return false;
  for (double v : values_)
    if (v != *l) return false;
  if (value) *value = *l;
  return true;
}

FamilyReport LambdaProfile::classify() const {
  FamilyReport rep;

  double inf = 2.0;
  inf = std::min(inf, side_inf_lambda(left_, true, window_lo_));
  inf = std::min(inf, side_inf_lambda(right_, false, window_hi()));
  for (double v : values_) inf = std::min(inf, v);
  rep.inf_lambda = inf;
  rep.in_E = inf > 0.0;
  rep.witness["E"] = "inf lambda = " + fmt(inf);

  const double deep = tail_limit_product(right_, window_hi() + 1);
  rep.in_B = deep == 0.0;
  rep.witness["B"] = rep.in_B ? "retention products vanish at every start index"
                              : "deep retention product stays at " +
                                    fmt(tail_product_limit(window_hi() + 1)) +
                                    " past the window";

  rep.in_P = side_has_units(left_);
  rep.witness["P"] = rep.in_P ? "full-transfer indices recur unboundedly below"
                              : "the left tail carries no full-transfer index";

  rep.sup_s = sup_s();
  rep.in_T = rep.sup_s.is_finite();
  {
    std::ostringstream os;
    os << "sup S = " << rep.sup_s;
    rep.witness["T"] = os.str();
  }

  double uv = 0.0;
  rep.in_U = is_uniform(&uv);
  rep.uniform_value = rep.in_U ? uv : 0.0;
  rep.witness["U"] =
      rep.in_U ? "constant profile at " + fmt(uv) : "profile is not constant";
  return rep;
}

}  // namespace geotransfer
