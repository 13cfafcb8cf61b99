#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace hivecote {

  using Clock = std::chrono::steady_clock;
  using Duration = std::chrono::nanoseconds;

  inline double to_seconds(Duration d) { return std::chrono::duration<double>(d).count(); }

  inline Duration from_seconds(double s) {
    return std::chrono::round<Duration>(std::chrono::duration<double>(s));
  }

  /// Parses "90", "90s", "500ms", "10m", "2h", "1d" or "<n>ns". A bare number is seconds.
  Duration parse_duration(std::string_view text);

  /// Train-time contract bookkeeping for one classifier. Elapsed time accumulates across
  /// build sessions, so a resumed build only gets what remains of the contract.
  class ContractClock {
  public:
    ContractClock() = default;
    explicit ContractClock(std::optional<Duration> limit) : limit_(limit) {}

    void start() { session_start_ = Clock::now(); }

    /// Folds the current session into the accumulated elapsed time.
    void stop() {
      elapsed_ += std::chrono::duration_cast<Duration>(Clock::now() - session_start_);
      session_start_ = Clock::now();
    }

    [[nodiscard]] Duration elapsed() const {
      return elapsed_ + std::chrono::duration_cast<Duration>(Clock::now() - session_start_);
    }

    [[nodiscard]] bool limited() const { return limit_.has_value(); }
    [[nodiscard]] std::optional<Duration> limit() const { return limit_; }

    /// Remaining contract time, or nullopt when uncontracted. Never negative.
    [[nodiscard]] std::optional<Duration> remaining() const {
      if (!limit_) { return std::nullopt; }
      const Duration left = *limit_ - elapsed();
      return left > Duration::zero() ? left : Duration::zero();
    }

    [[nodiscard]] bool time_remaining() const { return !limit_ || elapsed() < *limit_; }

    void set_limit(std::optional<Duration> limit) { limit_ = limit; }
    void set_elapsed(Duration d) { elapsed_ = d; }
    [[nodiscard]] Duration accumulated() const { return elapsed_; }

  private:
    std::optional<Duration> limit_{};
    Duration elapsed_{0};
    Clock::time_point session_start_{Clock::now()};
  };

} // namespace hivecote
