#include <hivecote/boss.hpp>
#include <hivecote/hive_cote.hpp>
#include <hivecote/registry.hpp>
#include <hivecote/rise.hpp>
#include <hivecote/stc.hpp>
#include <hivecote/tsf.hpp>

#include <stdexcept>

namespace hivecote {

  const std::vector<std::string>& classifier_names() {
    static const std::vector<std::string> names{"TSF", "RISE", "cBOSS", "STC", "HC"};
    return names;
  }

  std::unique_ptr<Classifier> make_classifier(std::string_view name, std::uint64_t seed, std::optional<Duration> contract) {
    if (name == "TSF") { return std::make_unique<Tsf>(TsfConfig{.seed = seed, .contract = contract}); }
    if (name == "RISE") { return std::make_unique<Rise>(RiseConfig{.seed = seed, .contract = contract}); }
    if (name == "cBOSS") { return std::make_unique<CBoss>(CBossConfig{.seed = seed, .contract = contract}); }
    if (name == "STC") {
      StcConfig config;
      config.seed = seed;
      if (contract) { config.search_time = *contract; }
      return std::make_unique<Stc>(config);
    }
    if (name == "HC") {
      HiveCoteConfig config;
      config.seed = seed;
      config.contract = contract;
      return std::make_unique<HiveCote>(config);
    }
    throw std::invalid_argument("unknown classifier: " + std::string(name));
  }

} // namespace hivecote
