#include <hivecote/cross_validation.hpp>

#include <stdexcept>

namespace hivecote {

  std::vector<std::size_t> stratified_folds(std::span<const int> labels, std::size_t class_count, std::size_t folds, Rng& rng) {
    if (folds < 2) { throw std::invalid_argument("cross-validation needs at least 2 folds"); }
    if (labels.size() < folds) { throw std::invalid_argument("more folds than cases"); }
    std::vector<std::size_t> assignment(labels.size(), 0);
    std::size_t position = 0;
    for (std::size_t c = 0; c < class_count; ++c) {
      std::vector<std::size_t> members;
      for (std::size_t i = 0; i < labels.size(); ++i) {
        if (static_cast<std::size_t>(labels[i]) == c) { members.push_back(i); }
      }
      shuffle(members, rng);
      for (const auto i: members) { assignment[i] = position++ % folds; }
    }
    return assignment;
  }

  CrossValidation cross_validate(std::span<const int> labels, std::size_t class_count, std::size_t folds,
                                 std::uint64_t seed, const FitPredict& fit_predict) {
    Rng rng = make_rng(seed, 0xcf);
    const auto assignment = stratified_folds(labels, class_count, folds, rng);
    CrossValidation cv;
    cv.probabilities.assign(labels.size(), Probabilities(class_count, 0.0));
    cv.predictions.assign(labels.size(), 0);
    for (std::size_t f = 0; f < folds; ++f) {
      std::vector<std::size_t> train;
      std::vector<std::size_t> test;
      for (std::size_t i = 0; i < labels.size(); ++i) { (assignment[i] == f ? test : train).push_back(i); }
      if (test.empty()) { continue; }
      auto probs = fit_predict(train, test, f);
      if (probs.size() != test.size()) { throw std::logic_error("fit_predict returned the wrong number of rows"); }
      for (std::size_t k = 0; k < test.size(); ++k) {
        cv.predictions[test[k]] = argmax(probs[k]);
        cv.probabilities[test[k]] = std::move(probs[k]);
      }
    }
    std::size_t correct = 0;
    for (std::size_t i = 0; i < labels.size(); ++i) { correct += cv.predictions[i] == labels[i] ? 1 : 0; }
    cv.accuracy = static_cast<double>(correct) / static_cast<double>(labels.size());
    return cv;
  }

  double cross_validated_accuracy(const PredictorBuilder& builder, const FeatureMatrix& data, std::size_t folds, Rng& rng) {
    const auto assignment = stratified_folds(data.labels, data.class_count, folds, rng);
    std::size_t correct = 0;
    for (std::size_t f = 0; f < folds; ++f) {
      std::vector<std::size_t> train;
      std::vector<std::size_t> test;
      for (std::size_t i = 0; i < data.rows; ++i) { (assignment[i] == f ? test : train).push_back(i); }
      if (test.empty()) { continue; }
      const auto predictor = builder(data.select_rows(train));
      for (const auto i: test) { correct += predictor(data.row(i)) == data.labels[i] ? 1 : 0; }
    }
    return static_cast<double>(correct) / static_cast<double>(data.rows);
  }

} // namespace hivecote
