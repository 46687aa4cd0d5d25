#pragma once

#include <cstdint>
#include <vector>

#include "coxsvrg/dataset.hpp"

namespace coxsvrg {

// Counts feature-parameter inner products x_j . v, the cost unit on which
// solvers are compared. Exactly one tick per d-dimensional dot product
// actually computed; cheap bookkeeping (O(d) vector adds, prox steps,
// exponentials) is never charged.
class InnerProductLedger {
 public:
  void charge(std::uint64_t n = 1) { count_ += n; }
  std::uint64_t count() const { return count_; }

 private:
  std::uint64_t count_ = 0;
};

// Patients sorted by decreasing observed time; ties put events before
// censored rows, then lower original index first. Because R_i = {j : y_j >=
// y_i}, each failure's risk set is a prefix of `order`. A failure inside a
// run of tied times owns the whole run as its prefix, so tied failures share
// one risk set and appear in each other's (the >= comparison).
//
// Failures are addressed by ordinal f = 0, 1, ... in sweep order (decreasing
// time). Patients placed after the last failure prefix belong to no risk set
// and are skipped by every sweep; n_active() is the size of the largest risk
// set, which equals n_patients() whenever the earliest observed time belongs
// to (or ties with) a failure.
class RiskSetIndex {
 public:
  std::size_t n_patients() const { return order_.size(); }
  std::size_t n_failures() const { return failure_patient_.size(); }
  std::size_t n_active() const { return failure_prefix_end_.back() + 1; }

  const std::vector<std::size_t>& order() const { return order_; }
  std::size_t patient_at(std::size_t position) const { return order_[position]; }

  std::size_t failure_patient(std::size_t f) const { return failure_patient_[f]; }
  // Position in `order` of the failure's own row (needed by likelihood terms).
  std::size_t failure_position(std::size_t f) const { return failure_position_[f]; }
  // Last position of the failure's risk-set prefix; nondecreasing in f.
  std::size_t failure_prefix_end(std::size_t f) const { return failure_prefix_end_[f]; }
  std::size_t risk_size(std::size_t f) const { return failure_prefix_end_[f] + 1; }

  friend RiskSetIndex build_risk_index(const SurvivalDataset& data);

 private:
  std::vector<std::size_t> order_;
  std::vector<std::size_t> failure_patient_;
  std::vector<std::size_t> failure_position_;
  std::vector<std::size_t> failure_prefix_end_;
};

// Throws std::invalid_argument if the dataset has no events.
RiskSetIndex build_risk_index(const SurvivalDataset& data);

}  // namespace coxsvrg
