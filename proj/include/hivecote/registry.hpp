#pragma once

#include <hivecote/classifier.hpp>

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace hivecote {

  /// TSF, RISE, cBOSS, STC and HC.
  const std::vector<std::string>& classifier_names();

  /// Default-configured classifier by name. Throws std::invalid_argument("unknown classifier: ...").
  std::unique_ptr<Classifier> make_classifier(std::string_view name, std::uint64_t seed = 0,
                                              std::optional<Duration> contract = std::nullopt);

} // namespace hivecote
