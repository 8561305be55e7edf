#pragma once

#include <cstdint>
#include <optional>
#include <vector>

namespace geotransfer {

using index_t = std::int64_t;

// Geometric tail hanging off one edge of an explicit window.
// At offset k >= 1 from the edge the value is coefficient * ratio^(k-1),
// so the whole tail sums to coefficient / (1 - ratio).
struct GeometricTail {
  double coefficient = 0.0;  // >= 0
  double ratio = 0.0;        // in [0, 1)

  double value_at_offset(index_t k) const;  // k >= 1
  double sum() const { return coefficient == 0.0 ? 0.0 : coefficient / (1.0 - ratio); }

  // Mass strictly beyond the first `skip` tail positions.
  double mass_beyond(index_t skip) const;

  // Equivalent tail anchored `shift` positions deeper (shift >= 0).
  GeometricTail reanchored(index_t shift) const;
};

// Nonnegative summable income stream over all integer indices: an explicit
// finite window of values plus an optional geometric tail on each side.
// Construction rejects negative or non-finite values and malformed tails.
class Stream {
 public:
  Stream() : window_lo_(0) {}
  Stream(index_t window_lo, std::vector<double> values,
         std::optional<GeometricTail> left_tail = std::nullopt,
         std::optional<GeometricTail> right_tail = std::nullopt);

  static Stream zero() { return Stream(); }
  // Indicator stream e^i: 1 at index i, 0 elsewhere.
  static Stream basis(index_t i);

  index_t window_lo() const { return window_lo_; }
  // Inclusive; window_lo() - 1 when the window is empty.
  index_t window_hi() const { return window_lo_ + static_cast<index_t>(values_.size()) - 1; }
  const std::vector<double>& values() const { return values_; }
  const std::optional<GeometricTail>& left_tail() const { return left_tail_; }
  const std::optional<GeometricTail>& right_tail() const { return right_tail_; }

  double value_at(index_t i) const;

  bool is_zero() const;
  bool has_left_mass() const;   // nonzero mass strictly below window_lo
  bool has_right_mass() const;  // nonzero mass strictly above window_hi
  // Smallest index with nonzero value; nullopt when the stream is zero or
  // the support is unbounded below.
  std::optional<index_t> support_lo() const;

  // Mass at indices < cut (exact closed form).
  double mass_below(index_t cut) const;

  double taxicab_norm() const;
  double sup_norm() const;

  Stream scaled(double a) const;        // a >= 0
  Stream shifted(index_t n = 1) const;  // shifted(n)(i + n) == (*this)(i)
  // Zeroes every index < -m, keeping the rest exactly.
  Stream truncate_left(index_t m) const;
  // Same stream with the values over [lo, hi] materialized into the window.
  // Zero edges may still be trimmed away again; only the represented stream
  // is guaranteed, not the window placement.
  Stream with_explicit_window(index_t lo, index_t hi) const;
  // Same stream with value_at(i) replaced (widening the window if needed).
  Stream with_value(index_t i, double v) const;

  friend Stream add(const Stream& a, const Stream& b);

  // Pointwise equality of the represented streams (not representations).
  friend bool exact_equal(const Stream& a, const Stream& b);

 private:
  void normalize();

  index_t window_lo_ = 0;
  std::vector<double> values_;
  std::optional<GeometricTail> left_tail_;
  std::optional<GeometricTail> right_tail_;
};

Stream add(const Stream& a, const Stream& b);
bool exact_equal(const Stream& a, const Stream& b);

// Sum over all i of |a_i - b_i| (exact closed form, tails included).
double taxicab_dist(const Stream& a, const Stream& b);
// Max over all i of |a_i - b_i|.
double sup_dist(const Stream& a, const Stream& b);

// Representative index set spanning the windows and tail heads of the given
// streams; used by checks that compare streams pointwise.
std::vector<index_t> probe_indices(const std::vector<const Stream*>& streams,
                                   index_t margin = 8);

}  // namespace geotransfer
