#include <hivecote/dataset.hpp>
#include <hivecote/spectral.hpp>

#include <fftw3.h>

#include <algorithm>
#include <map>
#include <mutex>
#include <stdexcept>

namespace hivecote {

  namespace {

    /// FFTW planning is not thread safe; execution with the new-array interface is.
    class PlanCache {
    public:
      ~PlanCache() {
        for (auto& [n, plan]: plans_) { fftw_destroy_plan(plan); }
      }

      fftw_plan get(std::size_t n) {
        std::lock_guard lock(mutex_);
        if (const auto it = plans_.find(n); it != plans_.end()) { return it->second; }
        auto* in = fftw_alloc_real(n);
        auto* out = fftw_alloc_complex(n / 2 + 1);
        fftw_plan plan = fftw_plan_dft_r2c_1d(static_cast<int>(n), in, out, FFTW_ESTIMATE | FFTW_UNALIGNED);
        fftw_free(in);
        fftw_free(out);
        if (plan == nullptr) { throw std::runtime_error("FFTW could not plan a transform of length " + std::to_string(n)); }
        plans_.emplace(n, plan);
        return plan;
      }

    private:
      std::mutex mutex_;
      std::map<std::size_t, fftw_plan> plans_;
    };

    PlanCache& plans() {
      static PlanCache cache;
      return cache;
    }

  } // namespace

  std::vector<std::complex<double>> real_dft(std::span<const double> segment) {
    const std::size_t n = segment.size();
    if (n == 0) { return {}; }
    std::vector<double> in(segment.begin(), segment.end());
    std::vector<std::complex<double>> out(n / 2 + 1);
    fftw_execute_dft_r2c(plans().get(n), in.data(), reinterpret_cast<fftw_complex*>(out.data()));
    return out;
  }

  std::vector<double> power_spectrum(std::span<const double> segment) {
    const auto coefficients = real_dft(segment);
    std::vector<double> ps;
    ps.reserve(segment.size() / 2);
    for (std::size_t j = 1; j <= segment.size() / 2; ++j) { ps.push_back(std::norm(coefficients[j])); }
    return ps;
  }

  std::vector<double> autocorrelation(std::span<const double> segment, std::size_t lags) {
    std::vector<double> acf(lags, 0.0);
    const auto [mean, sd] = mean_and_std(segment);
    if (sd <= sigma_floor) { return acf; }
    const std::size_t n = segment.size();
    std::vector<double> centred(n);
    double energy = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
      centred[t] = segment[t] - mean;
      energy += centred[t] * centred[t];
    }
    for (std::size_t lag = 1; lag <= lags && lag < n; ++lag) {
      double s = 0.0;
      for (std::size_t t = 0; t + lag < n; ++t) { s += centred[t] * centred[t + lag]; }
      acf[lag - 1] = s / energy;
    }
    return acf;
  }

  std::vector<double> spectral_features(std::span<const double> segment, std::size_t max_lags) {
    if (segment.size() < 2) { throw std::invalid_argument("spectral features need a segment of length >= 2"); }
    auto features = power_spectrum(segment);
    const auto acf = autocorrelation(segment, std::min(max_lags, segment.size() - 1));
    features.insert(features.end(), acf.begin(), acf.end());
    return features;
  }

} // namespace hivecote
