#pragma once

#include <memory>
#include <string>
#include <vector>

#include "geotransfer/lambda_profile.hpp"
#include "geotransfer/stream.hpp"

namespace geotransfer {

// Result of evaluating a profile-driven allocation over a finite window.
// Mass accounting: window sum + tail_allocation_sum + leaked_mass equals
// the whole income minus anything allocated strictly left of the window.
struct AllocationResult {
  index_t window_lo = 0;
  std::vector<double> allocations;
  double residual_transfer = 0.0;    // transfer pending just past the window
  double tail_allocation_sum = 0.0;  // allocations beyond the window
  double leaked_mass = 0.0;          // mass that no index ever receives
};

// Transfer arriving at index i: sum_{j<i} prod_{k=j}^{i-1}(1-lambda_k) r_j.
// Finite for every summable stream.
double incoming_transfer(const LambdaProfile& p, const Stream& r, index_t i);

// Forward-recurrence evaluation over [window_lo, window_hi]. Rejects
// windows that start above an explicitly carried nonzero value; a left
// income tail is folded into the seed transfer exactly.
AllocationResult allocate(const LambdaProfile& p, const Stream& r, index_t window_lo,
                          index_t window_hi);

// Single-index evaluation by direct term-by-term summation. Deliberately
// independent of the closed forms above; serves as their oracle.
double allocate_direct(const LambdaProfile& p, const Stream& r, index_t i);

// Closed-form total of all allocations, and of those strictly below j.
double total_allocated(const LambdaProfile& p, const Stream& r);
double total_below(const LambdaProfile& p, const Stream& r, index_t j);

// An allocation rule: a map from income streams to allocation streams.
class Rule {
 public:
  virtual ~Rule() = default;
  virtual std::string name() const = 0;
  virtual Stream apply(const Stream& r) const = 0;
  // sum_{i<j} (r_i - phi_i(r)): mass kept below j net of allocations there.
  virtual double residual_below(const Stream& r, index_t j) const;
};

class GeometricRule : public Rule {
 public:
  explicit GeometricRule(LambdaProfile profile, std::string label = "geometric");
  const LambdaProfile& profile() const { return profile_; }
  std::string name() const override { return label_; }
  Stream apply(const Stream& r) const override;
  double residual_below(const Stream& r, index_t j) const override;

 private:
  LambdaProfile profile_;
  std::string label_;
};

// The stream generation j faces once everyone below has consumed and passed
// on: r_i for i > j, the folded balance at j, zero below. Throws
// std::domain_error when the folded balance at j is negative beyond noise.
Stream consistency_transform(const Rule& rule, const Stream& r, index_t j);

struct LambdaRecovery {
  std::vector<double> values;  // phi_i(e^i) over the window
  bool feasible = true;        // all recovered values within [0, 1]
};
LambdaRecovery recover_lambda(const Rule& rule, index_t lo, index_t hi);

}  // namespace geotransfer
