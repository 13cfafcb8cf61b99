#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace hivecote::cli {

  /// Rewrites tsml-style single-dash long flags ("-dp=path") to "--dp=path" so the parser
  /// accepts both spellings. Anything else passes through unchanged.
  inline std::vector<std::string> normalise_flags(int argc, char** argv, const std::vector<std::string_view>& long_names) {
    std::vector<std::string> out;
    for (int i = 1; i < argc; ++i) {
      std::string arg = argv[i];
      if (arg.size() > 2 && arg[0] == '-' && arg[1] != '-') {
        const auto eq = arg.find('=');
        const std::string_view key = std::string_view(arg).substr(1, eq == std::string::npos ? std::string::npos : eq - 1);
        for (const auto name: long_names) {
          if (key == name) {
            arg = "-" + arg;
            break;
          }
        }
      }
      out.push_back(std::move(arg));
    }
    return out;
  }

} // namespace hivecote::cli
