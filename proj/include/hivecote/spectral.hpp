#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace hivecote {

  /// |X_j|^2 for j = 1..floor(r/2) of the unnormalised forward DFT (DC excluded).
  std::vector<double> power_spectrum(std::span<const double> segment);

  /// Unnormalised forward DFT coefficients 0..floor(r/2) of a real segment.
  std::vector<std::complex<double>> real_dft(std::span<const double> segment);

  /// Biased autocorrelation at lags 1..lags, normalised by the lag-0 centred energy.
  /// A segment with population stddev <= sigma_floor gives all zeros.
  std::vector<double> autocorrelation(std::span<const double> segment, std::size_t lags);

  /// [power spectrum, ACF_1..ACF_L] with L = min(max_lags, r - 1).
  std::vector<double> spectral_features(std::span<const double> segment, std::size_t max_lags = 100);

  constexpr std::size_t spectral_feature_count(std::size_t r, std::size_t max_lags = 100) {
    return r / 2 + (max_lags < r - 1 ? max_lags : r - 1);
  }

} // namespace hivecote
