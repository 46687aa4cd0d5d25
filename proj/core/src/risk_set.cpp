#include "coxsvrg/risk_set.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace coxsvrg {

RiskSetIndex build_risk_index(const SurvivalDataset& data) {
  if (data.n_events() == 0)
    throw std::invalid_argument("build_risk_index: dataset has no events");

  const std::size_t n_pat = data.n_patients();
  RiskSetIndex idx;
  idx.order_.resize(n_pat);
  std::iota(idx.order_.begin(), idx.order_.end(), std::size_t{0});
  std::sort(idx.order_.begin(), idx.order_.end(),
            [&](std::size_t a, std::size_t b) {
              if (data.time(a) != data.time(b)) return data.time(a) > data.time(b);
              if (data.event(a) != data.event(b)) return data.event(a);
              return a < b;
            });

  // tie_end[p] = last position sharing order_[p]'s observed time.
  std::vector<std::size_t> tie_end(n_pat);
  for (std::size_t p = n_pat; p-- > 0;) {
    const bool tied_with_next =
        p + 1 < n_pat && data.time(idx.order_[p]) == data.time(idx.order_[p + 1]);
    tie_end[p] = tied_with_next ? tie_end[p + 1] : p;
  }

  for (std::size_t p = 0; p < n_pat; ++p) {
    const std::size_t patient = idx.order_[p];
    if (!data.event(patient)) continue;
    idx.failure_patient_.push_back(patient);
    idx.failure_position_.push_back(p);
    idx.failure_prefix_end_.push_back(tie_end[p]);
  }
  return idx;
}

}  // namespace coxsvrg
