#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "geotransfer/axiom_lab.hpp"
#include "geotransfer/rule_engine.hpp"

namespace geotransfer {

// A named rule together with the outcome each core axiom is expected to
// produce on it. Every gallery rule is built to fail exactly one of the five
// core axioms and satisfy the other four, which shows no axiom in that set is
// implied by the rest.
struct GalleryRule {
  std::string name;
  std::shared_ptr<const Rule> rule;
  std::map<std::string, Outcome> expected_matrix;
};

// The five core axiom ids, in matrix column order.
const std::vector<std::string>& matrix_axioms();

// The five separating rules, in matrix row order.
std::vector<GalleryRule> gallery();

struct MatrixCell {
  std::string rule;
  std::string axiom;
  Outcome outcome = Outcome::kPass;
  Outcome expected = Outcome::kPass;
  bool match = false;
  std::optional<Witness> witness;  // present when the check failed
};

struct IndependenceMatrix {
  std::vector<MatrixCell> cells;  // row-major: rules x axioms
  bool all_match = true;
};

IndependenceMatrix independence_matrix(const Battery& battery, const CheckConfig& cfg = {});

// Rows = rules, columns = axioms, each cell "<outcome>/<match marker>".
std::string matrix_csv(const IndependenceMatrix& m);

}  // namespace geotransfer
