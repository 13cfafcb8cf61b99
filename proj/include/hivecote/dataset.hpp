#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace hivecote {

  /// Raised by the file loaders; the message carries the offending line number.
  class format_error : public std::runtime_error {
  public:
    format_error(const std::string& what, std::size_t line)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
    [[nodiscard]] std::size_t line() const noexcept { return line_; }
  private:
    std::size_t line_;
  };

  /// Inclusive [start, end] index range into a series.
  struct Interval {
    std::size_t start{0};
    std::size_t end{0};

    [[nodiscard]] std::size_t length() const { return end - start + 1; }
    friend bool operator==(const Interval&, const Interval&) = default;

    template<class Archive> void serialize(Archive& ar) { ar(start, end); }
  };

  /// n equal-length univariate series with labels in [0, class_count).
  /// Immutable after construction.
  class LabeledSeriesSet {
  public:
    LabeledSeriesSet() = default;

    /// `values` is row-major n x m. Throws std::invalid_argument on any invariant violation.
    LabeledSeriesSet(std::vector<double> values, std::size_t series_length, std::vector<int> labels,
                     std::vector<std::string> class_names, std::string name = {});

    /// Convenience for small literal sets.
    static LabeledSeriesSet from_rows(const std::vector<std::vector<double>>& rows, std::vector<int> labels,
                                      std::size_t class_count);

    [[nodiscard]] std::size_t size() const { return labels_.size(); }
    [[nodiscard]] std::size_t series_length() const { return length_; }
    [[nodiscard]] std::size_t class_count() const { return class_names_.size(); }
    [[nodiscard]] const std::vector<std::string>& class_names() const { return class_names_; }
    [[nodiscard]] const std::string& name() const { return name_; }

    [[nodiscard]] std::span<const double> series(std::size_t i) const {
      return {values_.data() + i * length_, length_};
    }
    [[nodiscard]] int label(std::size_t i) const { return labels_[i]; }
    [[nodiscard]] const std::vector<int>& labels() const { return labels_; }
    [[nodiscard]] const std::vector<double>& values() const { return values_; }

    [[nodiscard]] std::vector<std::size_t> class_counts() const;

    /// Subset in the given index order; keeps the class universe.
    [[nodiscard]] LabeledSeriesSet subset(std::span<const std::size_t> indices) const;

    /// Throws unless every class in [0, c) has at least one case.
    void require_all_classes() const;

    /// Throws unless `other` has the same series length and class universe.
    void require_compatible(const LabeledSeriesSet& other) const;

  private:
    std::vector<double> values_;
    std::size_t length_{0};
    std::vector<int> labels_;
    std::vector<std::string> class_names_;
    std::string name_;
  };

  /// Loads a `.ts` file (equal length, univariate, with a @classLabel list).
  LabeledSeriesSet load_ts_file(const std::filesystem::path& path);
  LabeledSeriesSet parse_ts(std::string_view text, std::string name = {});

  /// Loads a headerless CSV, one case per line, label in the last column.
  /// Class names are the distinct labels in order of first appearance unless `class_names` is given.
  LabeledSeriesSet load_csv_file(const std::filesystem::path& path, std::vector<std::string> class_names = {});
  LabeledSeriesSet parse_csv(std::string_view text, std::vector<std::string> class_names = {}, std::string name = {});

  /// Writes a `.ts` file with shortest round-trip formatting of every value.
  std::string format_ts(const LabeledSeriesSet& data);
  void write_ts_file(const LabeledSeriesSet& data, const std::filesystem::path& path);

  /// Loads `<dir>/<name>_TRAIN.ts` and `_TEST.ts` (falling back to `.csv`).
  std::pair<LabeledSeriesSet, LabeledSeriesSet> load_train_test(const std::filesystem::path& dir, const std::string& name);

  /// Fold 1 returns the split unchanged. Any other fold pools the cases and redraws a
  /// stratified split with the original per-class train counts, seeded by the fold.
  std::pair<LabeledSeriesSet, LabeledSeriesSet> resample(const LabeledSeriesSet& train, const LabeledSeriesSet& test, int fold);

  /// Below this population standard deviation a segment normalises to all zeros.
  inline constexpr double sigma_floor = 1e-8;

  /// Population mean and standard deviation.
  std::pair<double, double> mean_and_std(std::span<const double> values);

  std::vector<double> z_normalize(std::span<const double> segment);

} // namespace hivecote
