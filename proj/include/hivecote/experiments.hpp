#pragma once

#include <hivecote/classifier.hpp>
#include <hivecote/hive_cote.hpp>
#include <hivecote/results.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

namespace hivecote {

  /// One classifier on one resample of one dataset.
  struct RunSpec {
    std::filesystem::path data_path;
    std::filesystem::path results_path;
    bool generate_train_files{false};
    std::string classifier_name;
    std::string dataset_name;
    /// 1-based; fold 1 is the original train/test split.
    int fold{1};
    std::optional<Duration> contract{};
    std::uint64_t seed{0};
    /// Above 1, HC builds its components in thread mode.
    unsigned threads{1};
  };

  struct RunOutcome {
    std::filesystem::path test_file;
    std::optional<std::filesystem::path> train_file;
    /// True when every requested file already existed and nothing was run.
    bool skipped{false};
    double test_accuracy{0.0};
  };

  /// Loads {data_path}/{dataset}/{dataset}_TRAIN|_TEST, resamples by fold, builds the
  /// classifier and writes {results_path}/{classifier}/Predictions/{dataset}/testFold{fold-1}.csv
  /// (and trainFold{fold-1}.csv from the train estimate when requested).
  RunOutcome run_experiment(const RunSpec& spec);

  /// Result for one split with rows built from `probabilities` (quantised, argmax predictions).
  ClassifierResult make_result(const std::string& dataset, const std::string& classifier, const std::string& split,
                               const std::string& parameters, std::span<const int> truth,
                               const std::vector<Probabilities>& probabilities, Duration build_time, Duration test_time);

  /// Writes train and test files for each component of a built ensemble under `root`, the
  /// train files from the stored weight estimates.
  void write_component_results(const HiveCote& ensemble, const LabeledSeriesSet& test, const std::filesystem::path& root,
                               const std::string& dataset, int file_fold);

} // namespace hivecote
