#include "coxsvrg/schedule.hpp"

#include <cmath>
#include <stdexcept>

namespace coxsvrg {

ScheduleSpec ScheduleSpec::theory_strong(double alpha, double rho) {
  if (!(alpha > 1.0)) throw std::invalid_argument("schedule: alpha must be > 1");
  if (!(rho > 0.0 && rho < 1.0))
    throw std::invalid_argument("schedule: rho must lie in (0, 1)");
  ScheduleSpec s;
  s.rule = Rule::TheoryStrong;
  s.alpha = alpha;
  s.rho = rho;
  return s;
}

ScheduleSpec ScheduleSpec::theory_convex(double alpha) {
  if (!(alpha > 1.0)) throw std::invalid_argument("schedule: alpha must be > 1");
  ScheduleSpec s;
  s.rule = Rule::TheoryConvex;
  s.alpha = alpha;
  return s;
}

ScheduleSpec ScheduleSpec::practical() {
  ScheduleSpec s;
  s.rule = Rule::Practical;
  return s;
}

std::uint64_t schedule_iterations(const ScheduleSpec& spec, std::uint64_t k,
                                  std::uint64_t n, std::uint64_t switch_phase) {
  if (k == 0) throw std::invalid_argument("schedule: phases are numbered from 1");
  constexpr double kCap = 4.611686018427388e18;  // 2^62
  const double kd = static_cast<double>(k);
  double value = 0.0;
  switch (spec.rule) {
    case ScheduleSpec::Rule::TheoryStrong:
      value = std::pow(kd, spec.alpha) * std::pow(spec.rho, -kd);
      break;
    case ScheduleSpec::Rule::TheoryConvex:
      value = std::pow(kd, spec.alpha);
      break;
    case ScheduleSpec::Rule::Practical: {
      if (n == 0) throw std::invalid_argument("schedule: practical rule needs n >= 1");
      const double nd = static_cast<double>(n);
      const double exponent = kd / static_cast<double>(switch_phase + 2);
      value = std::min(std::pow(nd, exponent), nd);
      break;
    }
  }
  if (!(value >= 1.0)) return 1;
  if (value >= kCap) return static_cast<std::uint64_t>(kCap);
  return static_cast<std::uint64_t>(std::ceil(value));
}

double contraction_rho(const ConvexityConstants& consts, std::uint64_t m, double gamma) {
  const double L = consts.smoothness;
  const double mu = consts.strong_convexity;
  if (!(L > 0.0)) throw std::invalid_argument("contraction_rho: smoothness must be > 0");
  if (!(mu > 0.0))
    throw std::invalid_argument("contraction_rho: strong convexity must be > 0");
  if (m == 0) throw std::invalid_argument("contraction_rho: phase length must be >= 1");
  if (!(gamma > 0.0 && gamma < 1.0 / (16.0 * L)))
    throw std::invalid_argument("contraction_rho: gamma must lie in (0, 1/(16 L))");
  const double md = static_cast<double>(m);
  const double denom = 1.0 - 8.0 * L * gamma;
  return 1.0 / (md * gamma * mu * denom) +
         8.0 * L * gamma * (1.0 + 1.0 / md) / denom;
}

double estimate_smoothness(const SurvivalDataset& data) {
  double best = 0.0;
  for (std::size_t i = 0; i < data.n_patients(); ++i) {
    double sq = 0.0;
    for (double x : data.row(i)) sq += x * x;
    if (sq > best) best = sq;
  }
  return best;
}

}  // namespace coxsvrg
