#include <cmath>
#include <cstdint>

#include "doctest.h"

#include "coxsvrg/schedule.hpp"
#include "oracles.hpp"

using namespace coxsvrg;

TEST_CASE("schedule: frozen values for each rule") {
  // ceil(k^2 * 0.5^-k) at k=3: 9 * 8 = 72.
  CHECK(schedule_iterations(ScheduleSpec::theory_strong(2.0, 0.5), 3, 1000, 5) == 72);
  // ceil(k^2) at k=5.
  CHECK(schedule_iterations(ScheduleSpec::theory_convex(2.0), 5, 1000, 5) == 25);
  // n^(k/(switch+2)) with n=1000, switch=5: k=1 -> ceil(1000^(1/7)) = 3,
  // k=7 -> 1000 exactly, beyond that capped at n.
  const ScheduleSpec prac = ScheduleSpec::practical();
  CHECK(schedule_iterations(prac, 1, 1000, 5) == 3);
  CHECK(schedule_iterations(prac, 7, 1000, 5) == 1000);
  CHECK(schedule_iterations(prac, 8, 1000, 5) == 1000);
  CHECK(schedule_iterations(prac, 1000, 1000, 5) == 1000);
  CHECK(schedule_iterations(prac, 1, 1, 5) == 1);
}

TEST_CASE("schedule: growth is nondecreasing in the phase number") {
  const ScheduleSpec specs[] = {ScheduleSpec::theory_strong(2.0, 0.8),
                                ScheduleSpec::theory_convex(1.5),
                                ScheduleSpec::practical()};
  for (const auto& s : specs) {
    std::uint64_t prev = 0;
    for (std::uint64_t k = 1; k <= 40; ++k) {
      const std::uint64_t n_k = schedule_iterations(s, k, 500, 5);
      CHECK(n_k >= prev);
      CHECK(n_k >= 1);
      prev = n_k;
    }
  }
}

TEST_CASE("schedule: overflow clamp and validation") {
  // k = 100 with rho = 0.5 would be ~1e34 iterations; clamped to 2^62.
  CHECK(schedule_iterations(ScheduleSpec::theory_strong(2.0, 0.5), 100, 10, 5) ==
        (std::uint64_t{1} << 62));

  CHECK_THROWS_AS(ScheduleSpec::theory_strong(1.0, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(ScheduleSpec::theory_strong(2.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(ScheduleSpec::theory_strong(2.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(ScheduleSpec::theory_strong(2.0, -0.2), std::invalid_argument);
  CHECK_THROWS_AS(ScheduleSpec::theory_convex(0.99), std::invalid_argument);
  CHECK_THROWS_AS(schedule_iterations(ScheduleSpec::practical(), 0, 10, 5),
                  std::invalid_argument);
  CHECK_THROWS_AS(schedule_iterations(ScheduleSpec::practical(), 3, 0, 5),
                  std::invalid_argument);
}

TEST_CASE("contraction factor: frozen value and limits") {
  ConvexityConstants c;
  c.smoothness = 1.0;
  c.strong_convexity = 1.0;

  // L = mu = 1, gamma = 1/32, m = 100:
  //   1/(100 * (1/32) * 0.75) + (0.25 * 1.01) / 0.75 = 128/300 + 1.01/3.
  const double got = contraction_rho(c, 100, 1.0 / 32.0);
  CHECK(std::abs(got - (128.0 / 300.0 + 1.01 / 3.0)) < 1e-9);
  CHECK(got < 1.0);

  // Long phases leave only the step-size term 8 L gamma / (1 - 8 L gamma).
  const double gamma = 1.0 / 40.0;
  const double tail = 8.0 * gamma / (1.0 - 8.0 * gamma);
  CHECK(std::abs(contraction_rho(c, 1'000'000'000'000ULL, gamma) - tail) < 1e-9);

  // Vanishing step sizes lose the variance-reduction benefit entirely.
  CHECK(contraction_rho(c, 100, 1e-9) > 1e6);
}

TEST_CASE("contraction factor: domain checks") {
  ConvexityConstants c;
  c.smoothness = 2.0;
  c.strong_convexity = 0.5;
  CHECK_THROWS_AS(contraction_rho(c, 10, 1.0 / 32.0), std::invalid_argument);  // = 1/(16L)
  CHECK_THROWS_AS(contraction_rho(c, 10, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(contraction_rho(c, 0, 1e-3), std::invalid_argument);
  ConvexityConstants no_mu = c;
  no_mu.strong_convexity = 0.0;
  CHECK_THROWS_AS(contraction_rho(no_mu, 10, 1e-3), std::invalid_argument);
  ConvexityConstants no_l = c;
  no_l.smoothness = 0.0;
  CHECK_THROWS_AS(contraction_rho(no_l, 10, 1e-3), std::invalid_argument);
}

TEST_CASE("smoothness estimate is the largest squared row norm") {
  const SurvivalDataset d({3.0, 4.0, 1.0, 0.0, -2.0, 2.0}, 2, {3.0, 2.0, 1.0},
                          {1, 0, 1});
  CHECK(estimate_smoothness(d) == doctest::Approx(25.0).epsilon(1e-15));

  coxsvrg::Rng rng(14);
  const auto inst = oracle::random_instance(rng, 30, 4);
  double best = 0.0;
  for (std::size_t i = 0; i < inst.data.n_patients(); ++i)
    best = std::max(best, oracle::dot(inst.data.row(i), inst.data.row(i)));
  CHECK(estimate_smoothness(inst.data) == doctest::Approx(best).epsilon(1e-15));
}
