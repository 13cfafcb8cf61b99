#include <hivecote/classifier.hpp>
#include <hivecote/cross_validation.hpp>

#include <cstring>
#include <stdexcept>

namespace hivecote {

  std::vector<Probabilities> Classifier::predict_proba(const LabeledSeriesSet& data) const {
    std::vector<Probabilities> out;
    out.reserve(data.size());
    for (std::size_t i = 0; i < data.size(); ++i) { out.push_back(predict_proba(data.series(i))); }
    return out;
  }

  TrainEstimate Classifier::estimate_train(const LabeledSeriesSet& train, const EstimateOptions& options) const {
    const auto start = Clock::now();
    std::optional<Duration> per_fold;
    if (options.budget) { per_fold = *options.budget / static_cast<long>(options.folds); }
    const auto cv = cross_validate(train.labels(), train.class_count(), options.folds, options.seed,
      [&](const std::vector<std::size_t>& fit_idx, const std::vector<std::size_t>& test_idx, std::size_t fold) {
        auto model = fresh(derive_seed(options.seed, fold + 1), per_fold);
        model->build(train.subset(fit_idx));
        std::vector<Probabilities> out;
        out.reserve(test_idx.size());
        for (const auto i: test_idx) { out.push_back(model->predict_proba(train.series(i))); }
        return out;
      });
    TrainEstimate est;
    est.probabilities = cv.probabilities;
    est.predictions = cv.predictions;
    est.accuracy = cv.accuracy;
    est.method = "cross-validation";
    est.duration = std::chrono::duration_cast<Duration>(Clock::now() - start);
    return est;
  }

  std::uint64_t fingerprint(const LabeledSeriesSet& data) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    const auto mix = [&](std::uint64_t v) {
      for (int b = 0; b < 8; ++b) {
        h ^= (v >> (8 * b)) & 0xffU;
        h *= 0x100000001b3ULL;
      }
    };
    mix(data.size());
    mix(data.series_length());
    mix(data.class_count());
    for (const double v: data.values()) {
      std::uint64_t bits = 0;
      std::memcpy(&bits, &v, sizeof bits);
      mix(bits);
    }
    for (const int y: data.labels()) { mix(static_cast<std::uint64_t>(y)); }
    return h;
  }

  void require_length(std::span<const double> series, std::size_t expected) {
    if (series.size() != expected) {
      throw std::invalid_argument("series length " + std::to_string(series.size()) + " does not match training length "
                                  + std::to_string(expected));
    }
  }

} // namespace hivecote
