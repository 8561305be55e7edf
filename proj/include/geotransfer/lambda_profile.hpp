#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "geotransfer/extreal.hpp"
#include "geotransfer/stream.hpp"

namespace geotransfer {

// Closed-form profile families available beyond the explicit window.
enum class FormulaId {
  kExample1Decay,  // lambda_i = 1 - exp(-1/2^i) for i >= 1, else 0
  kVennBlocks,     // lambda_i = 1 for i < 0 and at i = n(n+1), else 0
};

double formula_lambda(FormulaId id, index_t i);
const char* formula_name(FormulaId id);
std::optional<FormulaId> formula_from_name(const std::string& name);

// Retention behaviour of one side of a profile beyond the explicit window.
struct TailSpec {
  enum class Kind { kConstant, kPeriodic, kFormula };

  static TailSpec constant(double c);
  // Anchored to absolute indices: value at i is pattern[floor_mod(i, size)].
  static TailSpec periodic(std::vector<double> pattern);
  static TailSpec formula(FormulaId id);

  Kind kind = Kind::kConstant;
  double constant_value = 0.0;
  std::vector<double> pattern;
  FormulaId formula_id = FormulaId::kExample1Decay;
};

// Classification of a profile against the named sub-families.
struct FamilyReport {
  bool in_B = false;  // every tail retention product vanishes
  bool in_E = false;  // retention rates bounded away from zero
  bool in_T = false;  // unit-stream responses uniformly bounded
  bool in_P = false;  // full-retention indices unbounded below
  bool in_U = false;  // constant profile
  double inf_lambda = 0.0;
  ExtReal sup_s;
  double uniform_value = 0.0;  // meaningful when in_U
  std::map<std::string, std::string> witness;
};

// Retention profile lambda: Z -> [0, 1]: a finite window of explicit values
// plus a TailSpec per side. Construction validates ranges and pattern sizes.
class LambdaProfile {
 public:
  LambdaProfile(index_t window_lo, std::vector<double> values, TailSpec left_tail,
                TailSpec right_tail);

  static LambdaProfile uniform(double c);

  index_t window_lo() const { return window_lo_; }
  index_t window_hi() const { return window_lo_ + static_cast<index_t>(values_.size()) - 1; }
  const std::vector<double>& values() const { return values_; }
  const TailSpec& left_tail() const { return left_; }
  const TailSpec& right_tail() const { return right_; }

  double lambda_at(index_t i) const;

  // prod_{k=i}^{j} (1 - lambda_k); j == i-1 yields the empty product 1,
  // anything shorter is rejected.
  double partial_product(index_t i, index_t j) const;

  // prod_{k=i}^{inf} (1 - lambda_k), the limit of the partial products.
  double tail_product_limit(index_t i) const;

  // S_i = lambda_i * sum_{j<=i} prod_{k=j}^{i-1}(1 - lambda_k). The inner
  // sum may diverge; by the partial-sum-limit convention lambda_i == 0
  // forces S_i = 0 even then.
  ExtReal s_value(index_t i) const;

  // sum_{j<=top} prod_{k=j}^{base-1}(1 - lambda_k) * w_j, with w == 1 when
  // no stream is given. Finite for summable weights; may diverge otherwise.
  ExtReal weighted_left_sum(index_t top, index_t base, const Stream* weights) const;

  ExtReal sup_s() const;
  FamilyReport classify() const;
  bool is_uniform(double* value = nullptr) const;

 private:
  index_t window_lo_;
  std::vector<double> values_;
  TailSpec left_;
  TailSpec right_;
};

inline index_t floor_mod(index_t i, index_t n) {
  index_t r = i % n;
  return r < 0 ? r + n : r;
}

}  // namespace geotransfer
