#pragma once

#include <cstdint>
#include <vector>

namespace pdsafe {

/// Runtime-safety accounting over every step a continuing system takes.
///
/// Steps must be recorded contiguously (index == total_steps()). Runtime
/// safety after t steps is (1/t) sum_{l<t} 1(s_l safe), and 1.0 before the
/// first step.
class SafetyLedger {
 public:
  void record(std::uint64_t step_index, bool safe);

  std::uint64_t total_steps() const { return total_; }
  std::uint64_t safe_steps() const { return safe_; }
  const std::vector<std::uint64_t>& unsafe_event_times() const { return unsafe_times_; }
  double runtime_safety() const;

  bool operator==(const SafetyLedger&) const = default;

 private:
  std::uint64_t total_ = 0;
  std::uint64_t safe_ = 0;
  std::vector<std::uint64_t> unsafe_times_;
};

}  // namespace pdsafe
