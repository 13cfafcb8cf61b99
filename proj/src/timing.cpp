#include <hivecote/timing.hpp>

#include <charconv>
#include <stdexcept>

namespace hivecote {

  Duration parse_duration(std::string_view text) {
    const auto fail = [&] { return std::invalid_argument("invalid duration '" + std::string(text) + "'"); };
    if (text.empty()) { throw fail(); }
    double value = 0;
    const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || value < 0) { throw fail(); }
    const std::string_view unit(end, text.data() + text.size() - end);
    double scale = 1.0;
    if (unit.empty() || unit == "s") { scale = 1.0; }
    else if (unit == "ns") { scale = 1e-9; }
    else if (unit == "us") { scale = 1e-6; }
    else if (unit == "ms") { scale = 1e-3; }
    else if (unit == "m" || unit == "min") { scale = 60.0; }
    else if (unit == "h") { scale = 3600.0; }
    else if (unit == "d") { scale = 86400.0; }
    else { throw fail(); }
    return from_seconds(value * scale);
  }

} // namespace hivecote
