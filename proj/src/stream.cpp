#include "geotransfer/stream.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace geotransfer {

namespace {

// Horizon for materializing incompatible tail pairs into the explicit
// window, and the mass that may be dropped beyond it.
constexpr index_t kMergeHorizon = 512;
constexpr double kMergeTolerance = 1e-12;

void check_value(double v) {
  if (!std::isfinite(v) || v < 0.0)
    throw std::invalid_argument("Stream: values must be finite and >= 0");
}

void check_tail(const GeometricTail& t) {
  if (!std::isfinite(t.coefficient) || t.coefficient < 0.0)
    throw std::invalid_argument("GeometricTail: coefficient must be finite and >= 0");
  if (!std::isfinite(t.ratio) || t.ratio < 0.0 || t.ratio >= 1.0)
    throw std::invalid_argument("GeometricTail: ratio must lie in [0, 1)");
}

}  // namespace

double GeometricTail::value_at_offset(index_t k) const {
  if (k < 1) throw std::invalid_argument("GeometricTail: offset must be >= 1");
  if (coefficient == 0.0) return 0.0;
  return coefficient * std::pow(ratio, static_cast<double>(k - 1));
}

double GeometricTail::mass_beyond(index_t skip) const {
  if (coefficient == 0.0) return 0.0;
  return coefficient * std::pow(ratio, static_cast<double>(skip)) / (1.0 - ratio);
}

GeometricTail GeometricTail::reanchored(index_t shift) const {
  return GeometricTail{coefficient * std::pow(ratio, static_cast<double>(shift)), ratio};
}

Stream::Stream(index_t window_lo, std::vector<double> values,
               std::optional<GeometricTail> left_tail,
               std::optional<GeometricTail> right_tail)
    : window_lo_(window_lo),
      values_(std::move(values)),
      left_tail_(std::move(left_tail)),
      right_tail_(std::move(right_tail)) {
  for (double v : values_) check_value(v);
  if (left_tail_) check_tail(*left_tail_);
  if (right_tail_) check_tail(*right_tail_);
  normalize();
}

void Stream::normalize() {
  if (left_tail_ && left_tail_->coefficient == 0.0) left_tail_.reset();
  if (right_tail_ && right_tail_->coefficient == 0.0) right_tail_.reset();
  // Zero edges are only redundant when no tail is anchored at that edge.
  if (!right_tail_) {
    while (!values_.empty() && values_.back() == 0.0) values_.pop_back();
  }
  if (!left_tail_) {
    std::size_t drop = 0;
    while (drop < values_.size() && values_[drop] == 0.0) ++drop;
    values_.erase(values_.begin(), values_.begin() + static_cast<std::ptrdiff_t>(drop));
    window_lo_ += static_cast<index_t>(drop);
  }
  if (values_.empty() && !left_tail_ && !right_tail_) window_lo_ = 0;
}

Stream Stream::basis(index_t i) { return Stream(i, {1.0}); }

double Stream::value_at(index_t i) const {
  if (i < window_lo_) {
    if (!left_tail_) return 0.0;
    return left_tail_->value_at_offset(window_lo_ - i);
  }
  const index_t hi = window_hi();
  if (i > hi) {
    if (!right_tail_) return 0.0;
    return right_tail_->value_at_offset(i - hi);
  }
  return values_[static_cast<std::size_t>(i - window_lo_)];
}

bool Stream::is_zero() const {
  if (left_tail_ || right_tail_) return false;
  for (double v : values_)
    if (v != 0.0) return false;
  return true;
}

bool Stream::has_left_mass() const { return left_tail_.has_value(); }

bool Stream::has_right_mass() const { return right_tail_.has_value(); }

std::optional<index_t> Stream::support_lo() const {
  if (left_tail_) return std::nullopt;
  for (std::size_t k = 0; k < values_.size(); ++k)
    if (values_[k] != 0.0) return window_lo_ + static_cast<index_t>(k);
  if (right_tail_) return window_hi() + 1;
  return std::nullopt;
}

double Stream::mass_below(index_t cut) const {
  double m = 0.0;
  if (left_tail_) {
    if (cut <= window_lo_) return left_tail_->mass_beyond(window_lo_ - cut);
    m += left_tail_->sum();
  }
  const index_t stop = std::min(cut, window_hi() + 1);
  for (index_t i = window_lo_; i < stop; ++i)
    m += values_[static_cast<std::size_t>(i - window_lo_)];
  if (right_tail_ && cut > window_hi() + 1)
    m += right_tail_->sum() - right_tail_->mass_beyond(cut - 1 - window_hi());
  return m;
}

double Stream::taxicab_norm() const {
  double m = left_tail_ ? left_tail_->sum() : 0.0;
  for (double v : values_) m += v;
  if (right_tail_) m += right_tail_->sum();
  return m;
}

double Stream::sup_norm() const {
  double m = 0.0;
  if (left_tail_) m = std::max(m, left_tail_->coefficient);
  if (right_tail_) m = std::max(m, right_tail_->coefficient);
  for (double v : values_) m = std::max(m, v);
  return m;
}

Stream Stream::scaled(double a) const {
  if (!std::isfinite(a) || a < 0.0)
    throw std::invalid_argument("Stream::scaled: factor must be finite and >= 0");
  Stream out = *this;
  for (double& v : out.values_) v *= a;
  if (out.left_tail_) out.left_tail_->coefficient *= a;
  if (out.right_tail_) out.right_tail_->coefficient *= a;
  out.normalize();
  return out;
}

Stream Stream::shifted(index_t n) const {
  Stream out = *this;
  out.window_lo_ += n;
  return out;
}

Stream Stream::truncate_left(index_t m) const {
  const index_t cut = -m;
  if (!left_tail_ && cut <= window_lo_) return *this;
  if (cut <= window_lo_) {
    std::vector<double> vals;
    vals.reserve(static_cast<std::size_t>(window_lo_ - cut) + values_.size());
    for (index_t i = cut; i < window_lo_; ++i)
      vals.push_back(left_tail_->value_at_offset(window_lo_ - i));
    vals.insert(vals.end(), values_.begin(), values_.end());
    return Stream(cut, std::move(vals), std::nullopt, right_tail_);
  }
  if (cut <= window_hi() + 1) {
    std::vector<double> vals(values_.begin() + static_cast<std::ptrdiff_t>(cut - window_lo_),
                             values_.end());
    return Stream(cut, std::move(vals), std::nullopt, right_tail_);
  }
  if (!right_tail_) return Stream::zero();
  GeometricTail t{right_tail_->value_at_offset(cut - window_hi()), right_tail_->ratio};
  return Stream(cut, {}, std::nullopt, t);
}

Stream Stream::with_explicit_window(index_t lo, index_t hi) const {
  const index_t nlo = std::min(lo, window_lo_);
  index_t nhi = std::max(hi, window_hi());
  if (nhi < nlo) nhi = nlo - 1;
  std::vector<double> vals;
  vals.reserve(static_cast<std::size_t>(nhi - nlo + 1));
  for (index_t i = nlo; i <= nhi; ++i) vals.push_back(value_at(i));
  std::optional<GeometricTail> lt, rt;
  if (left_tail_)
    lt = GeometricTail{left_tail_->value_at_offset(window_lo_ - nlo + 1), left_tail_->ratio};
  if (right_tail_)
    rt = GeometricTail{right_tail_->value_at_offset(nhi + 1 - window_hi()), right_tail_->ratio};
  return Stream(nlo, std::move(vals), lt, rt);
}

Stream Stream::with_value(index_t i, double v) const {
  const index_t nlo = std::min(i, window_lo_);
  const index_t nhi = std::max(i, window_hi());
  std::vector<double> vals;
  vals.reserve(static_cast<std::size_t>(nhi - nlo + 1));
  for (index_t k = nlo; k <= nhi; ++k) vals.push_back(k == i ? v : value_at(k));
  std::optional<GeometricTail> lt, rt;
  if (left_tail_)
    lt = GeometricTail{left_tail_->value_at_offset(window_lo_ - nlo + 1), left_tail_->ratio};
  if (right_tail_)
    rt = GeometricTail{right_tail_->value_at_offset(nhi + 1 - window_hi()), right_tail_->ratio};
  return Stream(nlo, std::move(vals), lt, rt);
}

namespace {

struct MergedSide {
  std::vector<double> extension;  // offsets 1..n outward from the window edge
  std::optional<GeometricTail> tail;
};

MergedSide merge_side(const std::optional<GeometricTail>& ta,
                      const std::optional<GeometricTail>& tb, double scale) {
  MergedSide out;
  if (!ta && !tb) return out;
  if (ta && !tb) {
    out.tail = ta;
    return out;
  }
  if (!ta && tb) {
    out.tail = tb;
    return out;
  }
  if (ta->ratio == tb->ratio) {
    out.tail = GeometricTail{ta->coefficient + tb->coefficient, ta->ratio};
    return out;
  }
  const GeometricTail& big = ta->ratio > tb->ratio ? *ta : *tb;
  const GeometricTail& small = ta->ratio > tb->ratio ? *tb : *ta;
  if (small.mass_beyond(kMergeHorizon) > kMergeTolerance * scale)
    throw std::domain_error(
        "Stream add: tail ratios differ and the slower tail still carries mass "
        "beyond the merge horizon");
  out.extension.reserve(kMergeHorizon);
  for (index_t k = 1; k <= kMergeHorizon; ++k)
    out.extension.push_back(ta->value_at_offset(k) + tb->value_at_offset(k));
  out.tail = big.reanchored(kMergeHorizon);
  return out;
}

GeometricTail left_anchored_at(const Stream& s, index_t lo) {
  if (!s.left_tail()) return GeometricTail{0.0, 0.0};
  return GeometricTail{s.left_tail()->value_at_offset(s.window_lo() - lo + 1),
                       s.left_tail()->ratio};
}

GeometricTail right_anchored_at(const Stream& s, index_t hi) {
  if (!s.right_tail()) return GeometricTail{0.0, 0.0};
  return GeometricTail{s.right_tail()->value_at_offset(hi + 1 - s.window_hi()),
                       s.right_tail()->ratio};
}

std::optional<GeometricTail> as_optional(const GeometricTail& t) {
  if (t.coefficient == 0.0) return std::nullopt;
  return t;
}

}  // namespace

Stream add(const Stream& a, const Stream& b) {
  const index_t lo = std::min(a.window_lo(), b.window_lo());
  const index_t hi = std::max(a.window_hi(), b.window_hi());
  const double scale = std::max(1.0, a.taxicab_norm() + b.taxicab_norm());
  MergedSide left = merge_side(as_optional(left_anchored_at(a, lo)),
                               as_optional(left_anchored_at(b, lo)), scale);
  MergedSide right = merge_side(as_optional(right_anchored_at(a, hi)),
                                as_optional(right_anchored_at(b, hi)), scale);
  std::vector<double> vals;
  vals.reserve(left.extension.size() + static_cast<std::size_t>(std::max<index_t>(hi - lo + 1, 0)) +
               right.extension.size());
  for (auto it = left.extension.rbegin(); it != left.extension.rend(); ++it) vals.push_back(*it);
  for (index_t i = lo; i <= hi; ++i) vals.push_back(a.value_at(i) + b.value_at(i));
  for (double v : right.extension) vals.push_back(v);
  return Stream(lo - static_cast<index_t>(left.extension.size()), std::move(vals), left.tail,
                right.tail);
}

bool exact_equal(const Stream& a, const Stream& b) {
  const index_t lo = std::min(a.window_lo(), b.window_lo());
  const index_t hi = std::max(a.window_hi(), b.window_hi());
  for (index_t i = lo; i <= hi; ++i)
    if (a.value_at(i) != b.value_at(i)) return false;
  const GeometricTail la = left_anchored_at(a, lo), lb = left_anchored_at(b, lo);
  const GeometricTail ra = right_anchored_at(a, hi), rb = right_anchored_at(b, hi);
  auto tails_equal = [](const GeometricTail& x, const GeometricTail& y) {
    if (x.coefficient != y.coefficient) return false;
    return x.coefficient == 0.0 || x.ratio == y.ratio;
  };
  return tails_equal(la, lb) && tails_equal(ra, rb);
}

namespace {

double partial_geometric(double c, double q, index_t n) {
  // sum_{k=0}^{n-1} c q^k
  if (c == 0.0 || n <= 0) return 0.0;
  if (q == 0.0) return c;
  return c * (1.0 - std::pow(q, static_cast<double>(n))) / (1.0 - q);
}

// sum_{k>=0} |c1 q1^k - c2 q2^k|, exact: the two term sequences cross at
// most once because their ratio is monotone in k.
double tail_abs_diff_sum(const GeometricTail& t1, const GeometricTail& t2) {
  if (t1.coefficient == 0.0) return t2.sum();
  if (t2.coefficient == 0.0) return t1.sum();
  if (t1.ratio == t2.ratio)
    return std::abs(t1.coefficient - t2.coefficient) / (1.0 - t1.ratio);
  const GeometricTail& big = t1.ratio > t2.ratio ? t1 : t2;
  const GeometricTail& small = t1.ratio > t2.ratio ? t2 : t1;
  if (big.coefficient >= small.coefficient) return big.sum() - small.sum();
  // big starts below small and overtakes it at k*
  index_t kstar;
  if (small.ratio == 0.0) {
    kstar = 1;
  } else {
    const double guess =
        std::log(small.coefficient / big.coefficient) / std::log(big.ratio / small.ratio);
    kstar = std::max<index_t>(1, static_cast<index_t>(std::floor(guess)) - 3);
    auto big_wins = [&](index_t k) {
      return big.coefficient * std::pow(big.ratio, static_cast<double>(k)) >=
             small.coefficient * std::pow(small.ratio, static_cast<double>(k));
    };
    while (kstar > 1 && big_wins(kstar - 1)) --kstar;
    while (!big_wins(kstar)) ++kstar;
  }
  const double big_head = partial_geometric(big.coefficient, big.ratio, kstar);
  const double small_head = partial_geometric(small.coefficient, small.ratio, kstar);
  return (small_head - big_head) + (big.sum() - big_head) - (small.sum() - small_head);
}

double tail_abs_diff_max(const GeometricTail& t1, const GeometricTail& t2) {
  double best = 0.0;
  double v1 = t1.coefficient, v2 = t2.coefficient;
  for (int k = 0; k < 200000; ++k) {
    best = std::max(best, std::abs(v1 - v2));
    v1 *= t1.ratio;
    v2 *= t2.ratio;
    if (std::max(v1, v2) <= best) break;
  }
  return best;
}

}  // namespace

double taxicab_dist(const Stream& a, const Stream& b) {
  const index_t lo = std::min(a.window_lo(), b.window_lo());
  const index_t hi = std::max(a.window_hi(), b.window_hi());
  double d = 0.0;
  for (index_t i = lo; i <= hi; ++i) d += std::abs(a.value_at(i) - b.value_at(i));
  d += tail_abs_diff_sum(left_anchored_at(a, lo), left_anchored_at(b, lo));
  d += tail_abs_diff_sum(right_anchored_at(a, hi), right_anchored_at(b, hi));
  return d;
}

double sup_dist(const Stream& a, const Stream& b) {
  const index_t lo = std::min(a.window_lo(), b.window_lo());
  const index_t hi = std::max(a.window_hi(), b.window_hi());
  double d = 0.0;
  for (index_t i = lo; i <= hi; ++i) d = std::max(d, std::abs(a.value_at(i) - b.value_at(i)));
  d = std::max(d, tail_abs_diff_max(left_anchored_at(a, lo), left_anchored_at(b, lo)));
  d = std::max(d, tail_abs_diff_max(right_anchored_at(a, hi), right_anchored_at(b, hi)));
  return d;
}

std::vector<index_t> probe_indices(const std::vector<const Stream*>& streams, index_t margin) {
  std::set<index_t> out;
  out.insert(0);
  for (const Stream* s : streams) {
    const index_t lo = s->window_lo();
    const index_t hi = s->window_hi();
    for (index_t d = 0; d <= margin; ++d) {
      out.insert(lo - d);
      out.insert(lo + d);
      out.insert(hi - d);
      out.insert(hi + d);
    }
    for (index_t d : {16, 64, 256}) {
      if (s->left_tail()) out.insert(lo - d);
      if (s->right_tail()) out.insert(hi + d);
    }
  }
  return std::vector<index_t>(out.begin(), out.end());
}

}  // namespace geotransfer
