#include "geotransfer/gallery.hpp"

#include <algorithm>
#include <sstream>

#include "geotransfer/lambda_profile.hpp"

namespace geotransfer {
namespace {

// Allocates twice every income. Linear and history-blind, but pays out more
// than arrives.
class DoubleRule : public Rule {
 public:
  std::string name() const override { return "double"; }
  Stream apply(const Stream& r) const override { return r.scaled(2.0); }
};

// Swaps the incomes at indices 0 and 1 so the earlier one receives the
// smaller of the two; everyone else keeps their own income. The allocation
// at index 0 peeks at a later income.
class SortingRule : public Rule {
 public:
  std::string name() const override { return "sorting"; }
  Stream apply(const Stream& r) const override {
    const double a = r.value_at(0);
    const double b = r.value_at(1);
    return r.with_value(0, std::min(a, b)).with_value(1, std::max(a, b));
  }
};

// Bends the first income through x^2/(1+x) and hands the shaved-off part to
// index 1, so doubling the income does not double the allocation.
class CurvedFirstRule : public Rule {
 public:
  std::string name() const override { return "curved_first"; }
  Stream apply(const Stream& r) const override {
    const double r0 = r.value_at(0);
    const double kept = r0 * r0 / (1.0 + r0);
    return r.with_value(0, kept).with_value(1, r.value_at(1) + (r0 - kept));
  }
};

// Identity on streams with finite support, geometric at rate 1/2 otherwise.
// Truncations of a tailed stream land in the identity branch while their
// limit does not, so the rule jumps across the branch boundary.
class SupportSwitchRule : public Rule {
 public:
  SupportSwitchRule()
      : half_(LambdaProfile(0, {0.5}, TailSpec::constant(0.5), TailSpec::constant(0.5))) {}
  std::string name() const override { return "support_switch"; }
  Stream apply(const Stream& r) const override {
    if (!r.left_tail() && !r.right_tail()) return r;
    return half_.apply(r);
  }

 private:
  GeometricRule half_;
};

// Each index receives a quarter of its own and its two predecessors'
// incomes. Folding the past into a pivot changes what the pivot's two
// successors see, so the rule is not consistent.
class MovingAverageRule : public Rule {
 public:
  std::string name() const override { return "moving_average"; }
  Stream apply(const Stream& r) const override {
    if (r.is_zero()) return Stream::zero();
    const index_t lo = r.window_lo();
    const index_t hi = r.window_hi() + 2;
    std::vector<double> vals;
    vals.reserve(static_cast<std::size_t>(hi - lo + 1));
    for (index_t i = lo; i <= hi; ++i)
      vals.push_back((r.value_at(i) + r.value_at(i - 1) + r.value_at(i - 2)) / 4.0);
    auto smear = [](const GeometricTail& t) {
      const double q = t.ratio;
      return GeometricTail{t.coefficient * (1.0 + q + q * q) / 4.0, q};
    };
    std::optional<GeometricTail> left, right;
    if (r.left_tail()) left = smear(*r.left_tail());
    if (r.right_tail()) right = smear(*r.right_tail());
    return Stream(lo, std::move(vals), left, right);
  }
};

}  // namespace

const std::vector<std::string>& matrix_axioms() {
  static const std::vector<std::string> names = {
      "feasibility", "independence_future_income", "scale_invariance", "continuity",
      "consistency"};
  return names;
}

std::vector<GalleryRule> gallery() {
  auto expect = [](const std::string& failing) {
    std::map<std::string, Outcome> m;
    for (const std::string& ax : matrix_axioms())
      m[ax] = ax == failing ? Outcome::kFail : Outcome::kPass;
    return m;
  };
  return {
      {"double", std::make_shared<DoubleRule>(), expect("feasibility")},
      {"sorting", std::make_shared<SortingRule>(), expect("independence_future_income")},
      {"curved_first", std::make_shared<CurvedFirstRule>(), expect("scale_invariance")},
      {"support_switch", std::make_shared<SupportSwitchRule>(), expect("continuity")},
      {"moving_average", std::make_shared<MovingAverageRule>(), expect("consistency")},
  };
}

IndependenceMatrix independence_matrix(const Battery& battery, const CheckConfig& cfg) {
  IndependenceMatrix m;
  for (const GalleryRule& g : gallery()) {
    for (const std::string& ax : matrix_axioms()) {
      const AxiomVerdict v = check_axiom(*g.rule, ax, battery, cfg);
      MatrixCell cell;
      cell.rule = g.name;
      cell.axiom = ax;
      cell.outcome = v.outcome;
      cell.expected = g.expected_matrix.at(ax);
      cell.match = v.outcome == cell.expected;
      cell.witness = v.witness;
      if (!cell.match) m.all_match = false;
      m.cells.push_back(std::move(cell));
    }
  }
  return m;
}

std::string matrix_csv(const IndependenceMatrix& m) {
  std::ostringstream out;
  out << "rule";
  for (const std::string& ax : matrix_axioms()) out << "," << ax;
  out << "\n";
  const std::size_t width = matrix_axioms().size();
  for (std::size_t row = 0; row * width < m.cells.size(); ++row) {
    out << m.cells[row * width].rule;
    for (std::size_t col = 0; col < width; ++col) {
      const MatrixCell& c = m.cells[row * width + col];
      out << "," << outcome_name(c.outcome) << "/"
          << (c.match ? "expected-match" : "MISMATCH");
    }
    out << "\n";
  }
  return out.str();
}

}  // namespace geotransfer
