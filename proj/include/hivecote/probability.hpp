#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace hivecote {

  using Probabilities = std::vector<double>;

  /// Index of the largest entry, lowest index on ties.
  inline int argmax(std::span<const double> values) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < values.size(); ++i) {
      if (values[i] > values[best]) { best = i; }
    }
    return static_cast<int>(best);
  }

  /// Fraction of votes per class.
  inline Probabilities vote_distribution(std::span<const int> votes, std::size_t class_count) {
    Probabilities p(class_count, 0.0);
    if (votes.empty()) { return p; }
    for (const int v: votes) { p[static_cast<std::size_t>(v)] += 1.0; }
    for (auto& x: p) { x /= static_cast<double>(votes.size()); }
    return p;
  }

} // namespace hivecote
