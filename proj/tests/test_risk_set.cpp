#include <algorithm>
#include <set>
#include <stdexcept>
#include <vector>

#include "doctest.h"

#include "coxsvrg/risk_set.hpp"
#include "oracles.hpp"

using coxsvrg::build_risk_index;
using coxsvrg::RiskSetIndex;
using coxsvrg::SurvivalDataset;

namespace {

SurvivalDataset tiny(std::vector<double> times, std::vector<std::uint8_t> events) {
  const std::size_t n = times.size();
  return SurvivalDataset(std::vector<double>(n, 1.0), 1, std::move(times),
                         std::move(events));
}

}  // namespace

TEST_CASE("three-patient example: order, failures, risk sizes") {
  const SurvivalDataset d = tiny({5, 3, 8}, {1, 1, 0});
  const RiskSetIndex idx = build_risk_index(d);

  CHECK(idx.order() == std::vector<std::size_t>{2, 0, 1});
  CHECK(idx.n_failures() == 2);
  CHECK(idx.failure_patient(0) == 0);
  CHECK(idx.failure_patient(1) == 1);
  CHECK(idx.failure_position(0) == 1);
  CHECK(idx.failure_position(1) == 2);
  CHECK(idx.risk_size(0) == 2);
  CHECK(idx.risk_size(1) == 3);
  CHECK(idx.n_active() == 3);
}

TEST_CASE("all-event distinct-time data has one failure per patient") {
  const SurvivalDataset d = tiny({4, 1, 3, 2}, {1, 1, 1, 1});
  const RiskSetIndex idx = build_risk_index(d);
  CHECK(idx.n_failures() == 4);
  // The smallest observed time sees everyone at risk.
  CHECK(idx.risk_size(3) == 4);
  CHECK(idx.failure_patient(3) == 1);
  CHECK(idx.n_active() == 4);
}

TEST_CASE("tied failures appear in each other's risk set") {
  const SurvivalDataset d = tiny({2, 2, 1}, {1, 1, 0});
  const RiskSetIndex idx = build_risk_index(d);
  CHECK(idx.n_failures() == 2);
  // Both failures own the whole tie run as their prefix.
  CHECK(idx.risk_size(0) == 2);
  CHECK(idx.risk_size(1) == 2);
  const std::set<std::size_t> prefix{idx.patient_at(0), idx.patient_at(1)};
  CHECK(prefix == std::set<std::size_t>{0, 1});
  // The trailing censored patient belongs to no risk set.
  CHECK(idx.n_active() == 2);
}

TEST_CASE("within a tie, events sort before censored rows") {
  const SurvivalDataset d = tiny({2, 2}, {0, 1});
  const RiskSetIndex idx = build_risk_index(d);
  CHECK(idx.order() == std::vector<std::size_t>{1, 0});
  CHECK(idx.risk_size(0) == 2);  // censored tie is still at risk (>= comparison)
}

TEST_CASE("prefixes equal brute-force risk sets on random data") {
  coxsvrg::Rng rng(2024);
  for (int rep = 0; rep < 60; ++rep) {
    const bool ties = rep % 2 == 0;
    const auto inst = oracle::random_instance(rng, 2 + rng.uniform_below(30), 3, 0.4, ties);

    for (std::size_t f = 0; f < inst.idx.n_failures(); ++f) {
      const std::size_t patient = inst.idx.failure_patient(f);
      std::set<std::size_t> prefix;
      for (std::size_t p = 0; p <= inst.idx.failure_prefix_end(f); ++p)
        prefix.insert(inst.idx.patient_at(p));

      const auto brute = oracle::risk_set_of(inst.data, patient);
      CHECK(prefix == std::set<std::size_t>(brute.begin(), brute.end()));
      CHECK(prefix.count(patient) == 1);
      CHECK(inst.idx.risk_size(f) == brute.size());
      if (f > 0) CHECK(inst.idx.failure_prefix_end(f) >= inst.idx.failure_prefix_end(f - 1));
    }
    CHECK(inst.idx.n_active() ==
          inst.idx.failure_prefix_end(inst.idx.n_failures() - 1) + 1);
  }
}

TEST_CASE("datasets with zero events are rejected before indexing") {
  CHECK_THROWS_AS(tiny({1, 2}, {0, 0}), std::invalid_argument);
}
