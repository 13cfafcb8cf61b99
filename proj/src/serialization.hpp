#pragma once

// Private helpers shared by the classifier state (de)serialisers.

#include <hivecote/checkpoint.hpp>
#include <hivecote/timing.hpp>

#include <cereal/archives/portable_binary.hpp>
#include <cereal/types/string.hpp>
#include <cereal/types/utility.hpp>
#include <cereal/types/vector.hpp>

#include <cstdint>
#include <optional>

namespace hivecote::detail {

  inline std::int64_t encode_duration(std::optional<Duration> d) { return d ? d->count() : -1; }
  inline std::optional<Duration> decode_duration(std::int64_t v) {
    if (v < 0) { return std::nullopt; }
    return Duration(v);
  }

  /// Runs `body` and converts any archive failure into a checkpoint_error.
  template<typename F>
  void guarded_load(F&& body) {
    try {
      body();
    } catch (const cereal::Exception& e) {
      throw checkpoint_error(std::string("corrupt classifier state: ") + e.what());
    }
  }

} // namespace hivecote::detail
