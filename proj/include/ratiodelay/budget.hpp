#pragma once

#include <chrono>
#include <functional>
#include <optional>

#include "ratiodelay/errors.hpp"

namespace ratiodelay {

/// Wall-clock budget polled by long-running loops. Default-constructed
/// budgets never expire.
class Budget {
 public:
  using Clock = std::chrono::steady_clock;

  Budget() = default;
  explicit Budget(std::chrono::milliseconds limit) : deadline_(Clock::now() + limit) {}

  /// Extra abort predicate, e.g. a closed client connection.
  void set_abort(std::function<bool()> abort) { abort_ = std::move(abort); }

  bool expired() const {
    return (deadline_ && Clock::now() > *deadline_) || (abort_ && abort_());
  }

  void check() const {
    if (expired()) throw Error(ErrorCode::BudgetExceeded, "", "computation exceeded its time budget");
  }

 private:
  std::optional<Clock::time_point> deadline_;
  std::function<bool()> abort_;
};

}  // namespace ratiodelay
