#pragma once

#include <hivecote/probability.hpp>
#include <hivecote/random.hpp>
#include <hivecote/tree.hpp>

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace hivecote {

  /// Fold index per case. Members of each class are shuffled and dealt round-robin, the
  /// dealing position carrying over between classes, so fold sizes differ by at most one
  /// and every class is spread as evenly as it can be.
  std::vector<std::size_t> stratified_folds(std::span<const int> labels, std::size_t class_count, std::size_t folds, Rng& rng);

  /// Out-of-fold predictions for every case.
  struct CrossValidation {
    std::vector<Probabilities> probabilities;
    std::vector<int> predictions;
    double accuracy{0.0};
  };

  /// `fit_predict(train_indices, test_indices, fold)` must return one probability vector per
  /// test index, in order.
  using FitPredict = std::function<std::vector<Probabilities>(const std::vector<std::size_t>&,
                                                              const std::vector<std::size_t>&, std::size_t)>;

  CrossValidation cross_validate(std::span<const int> labels, std::size_t class_count, std::size_t folds,
                                 std::uint64_t seed, const FitPredict& fit_predict);

  using Predictor = std::function<int(std::span<const double>)>;
  using PredictorBuilder = std::function<Predictor(const FeatureMatrix&)>;

  /// Stratified k-fold accuracy of `builder` on `data`.
  double cross_validated_accuracy(const PredictorBuilder& builder, const FeatureMatrix& data, std::size_t folds, Rng& rng);

} // namespace hivecote
