#pragma once

#include <hivecote/classifier.hpp>
#include <hivecote/probability.hpp>

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace hivecote {

  struct ResultRow {
    int true_label{0};
    int predicted_label{0};
    Probabilities probabilities;

    friend bool operator==(const ResultRow&, const ResultRow&) = default;
  };

  /// One results file: a classifier's predictions on one split of one dataset fold.
  struct ClassifierResult {
    std::string dataset;
    std::string classifier;
    /// "train" or "test"
    std::string split;
    std::string parameters;
    double accuracy{0.0};
    std::int64_t build_time_ns{0};
    std::int64_t test_time_ns{0};
    std::vector<ResultRow> rows;

    friend bool operator==(const ClassifierResult&, const ClassifierResult&) = default;
  };

  /// Rounds every entry to 6 significant digits, then moves the rounding residual onto the
  /// largest entry (rounded again), so the printed row still sums to 1 within 1e-6 and
  /// reading the printed text back gives exactly these doubles.
  Probabilities quantize_probabilities(std::span<const double> p);

  /// Fraction of rows with true == predicted.
  double row_accuracy(const std::vector<ResultRow>& rows);

  /// Throws std::invalid_argument on an empty row set, mixed row widths, labels out of
  /// range, a row not summing to 1 within 1e-6 or a stored accuracy off by more than 1e-12.
  void validate_result(const ClassifierResult& result);

  std::string format_result(const ClassifierResult& result);
  ClassifierResult parse_result(std::string_view text);

  void write_result(const ClassifierResult& result, const std::filesystem::path& path);
  ClassifierResult read_result(const std::filesystem::path& path);

  /// Rows for `probabilities` with predictions taken as the argmax of the quantised vectors.
  std::vector<ResultRow> make_rows(std::span<const int> truth, const std::vector<Probabilities>& probabilities);

  /// Quantises a train estimate in place and recomputes its predictions and accuracy from
  /// the quantised vectors, so the estimate matches what a train file would record.
  void quantize_estimate(TrainEstimate& estimate, std::span<const int> truth);

  struct ResultSummary {
    double accuracy{0.0};
    /// Recall per class index; classes with no true cases are omitted.
    std::map<int, double> recall;
    double build_hours{0.0};
    double build_minutes{0.0};
    double test_hours{0.0};
    double test_minutes{0.0};
  };

  ResultSummary score(const ClassifierResult& result);

} // namespace hivecote
