#include <stdexcept>

#include "doctest.h"
#include "pdsafe/rng.hpp"
#include "pdsafe/safety.hpp"

using namespace pdsafe;

TEST_CASE("empty ledger") {
  const SafetyLedger ledger;
  CHECK(ledger.total_steps() == 0);
  CHECK(ledger.runtime_safety() == 1.0);
}

TEST_CASE("fractions") {
  SafetyLedger all;
  for (std::uint64_t i = 0; i < 100; ++i) all.record(i, true);
  CHECK(all.runtime_safety() == 1.0);
  CHECK(all.unsafe_event_times().empty());

  SafetyLedger one;
  for (std::uint64_t i = 0; i < 100; ++i) one.record(i, i != 42);
  CHECK(one.runtime_safety() == doctest::Approx(0.99));
  CHECK(one.unsafe_event_times() == std::vector<std::uint64_t>{42});

  SafetyLedger most;
  for (std::uint64_t i = 0; i < 1000; ++i) most.record(i, i % 100 != 7);
  CHECK(most.runtime_safety() == doctest::Approx(0.99));
}

TEST_CASE("contiguous recording") {
  SafetyLedger ledger;
  ledger.record(0, true);
  CHECK_THROWS_AS(ledger.record(2, true), std::invalid_argument);
  CHECK_THROWS_AS(ledger.record(0, true), std::invalid_argument);
  ledger.record(1, false);
  CHECK(ledger.total_steps() == 2);
}

TEST_CASE("runtime safety moves with the step outcome") {
  RngStream rng(3);
  SafetyLedger ledger;
  double prev = ledger.runtime_safety();
  for (std::uint64_t t = 0; t < 5000; ++t) {
    const bool safe = rng.uniform() < 0.9;
    ledger.record(t, safe);
    const double now = ledger.runtime_safety();
    if (safe) {
      CHECK(now >= prev);
    } else {
      CHECK(now < prev);
    }
    prev = now;
    CHECK(ledger.safe_steps() <= ledger.total_steps());
    CHECK(ledger.unsafe_event_times().size() == ledger.total_steps() - ledger.safe_steps());
  }
  const auto& times = ledger.unsafe_event_times();
  for (std::size_t i = 1; i < times.size(); ++i) CHECK(times[i] > times[i - 1]);
}
