#include "pdsafe/safety.hpp"

#include <stdexcept>
#include <string>

namespace pdsafe {

void SafetyLedger::record(std::uint64_t step_index, bool safe) {
  if (step_index != total_) {
    throw std::invalid_argument("safety ledger: expected step " + std::to_string(total_) + ", got " +
                                std::to_string(step_index));
  }
  ++total_;
  if (safe) {
    ++safe_;
  } else {
    unsafe_times_.push_back(step_index);
  }
}

double SafetyLedger::runtime_safety() const {
  if (total_ == 0) return 1.0;
  return static_cast<double>(safe_) / static_cast<double>(total_);
}

}  // namespace pdsafe
