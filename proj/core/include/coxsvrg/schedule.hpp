#pragma once

#include <cstdint>

#include "coxsvrg/dataset.hpp"

namespace coxsvrg {

// Per-phase growth rule for the number of estimator iterations N_k.
struct ScheduleSpec {
  enum class Rule { TheoryStrong, TheoryConvex, Practical };

  Rule rule = Rule::Practical;
  double alpha = 0.0;  // polynomial exponent, > 1 where used
  double rho = 0.0;    // geometric base in (0, 1), TheoryStrong only

  // ceil(k^alpha * rho^-k): enough growth for a linear rate when the phase
  // contraction factor is at most rho.
  static ScheduleSpec theory_strong(double alpha, double rho);
  // ceil(k^alpha): enough for an O(1/K) rate without strong convexity.
  static ScheduleSpec theory_convex(double alpha);
  // ceil(n^(k / (switch_phase + 2))) capped at n: cheap early phases that
  // reach exact-sum cost right around the hybrid switch.
  static ScheduleSpec practical();
};

// N_k for phase k >= 1. n is the number of failures; switch_phase feeds the
// practical rule only. Results are clamped to 2^62 to keep arithmetic safe.
std::uint64_t schedule_iterations(const ScheduleSpec& spec, std::uint64_t k,
                                  std::uint64_t n, std::uint64_t switch_phase);

struct ConvexityConstants {
  double smoothness = 0.0;        // L
  double strong_convexity = 0.0;  // mu, from the ridge part of the penalty
  double iterate_radius = 0.0;    // bound on |theta - theta*|, diagnostics only
};

// Worst-case per-phase contraction factor
//   rho = 1 / (m gamma mu (1 - 8 L gamma)) + 8 L gamma (1 + 1/m) / (1 - 8 L gamma)
// for phase length m and step gamma. Requires mu > 0 and gamma in
// (0, 1/(16 L)); a value below 1 certifies a linear rate for the matched
// N_k schedule.
double contraction_rho(const ConvexityConstants& consts, std::uint64_t m, double gamma);

// Conservative smoothness estimate max_j |x_j|^2 (the softmax Hessian is
// dominated by the largest squared feature row).
double estimate_smoothness(const SurvivalDataset& data);

}  // namespace coxsvrg
