#pragma once

#include <hivecote/dataset.hpp>
#include <hivecote/probability.hpp>
#include <hivecote/timing.hpp>

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace hivecote {

  /// Limits on a single build session.
  struct BuildControl {
    /// Pause after this many base units (trees, parameter samples, search rounds) have been
    /// added in this call. The classifier can then be checkpointed and resumed.
    std::optional<std::size_t> unit_limit{};
  };

  enum class BuildStatus { complete, paused };

  /// Per-case train predictions and the accuracy derived from them.
  struct TrainEstimate {
    std::vector<Probabilities> probabilities;
    std::vector<int> predictions;
    double accuracy{0.0};
    /// "cross-validation" or "internal"
    std::string method;
    Duration duration{0};
  };

  struct EstimateOptions {
    std::size_t folds{10};
    std::uint64_t seed{0};
    /// Total time allowed for the estimate; split equally across folds.
    std::optional<Duration> budget{};
  };

  /// Common surface of the four components and of the ensemble itself.
  ///
  /// `build` always continues from the current progress: on a fresh object it starts a
  /// build, on a paused or checkpoint-restored object it resumes. Train data must be the
  /// same set on every call (checked against a fingerprint).
  class Classifier {
  public:
    virtual ~Classifier() = default;

    [[nodiscard]] virtual std::string name() const = 0;
    /// Free text, one line; used as line 2 of results files.
    [[nodiscard]] virtual std::string parameters() const = 0;

    virtual BuildStatus build(const LabeledSeriesSet& train, const BuildControl& control = {}) = 0;
    [[nodiscard]] virtual bool is_built() const = 0;
    /// Number of base units built so far.
    [[nodiscard]] virtual std::size_t units_built() const = 0;

    [[nodiscard]] virtual Probabilities predict_proba(std::span<const double> series) const = 0;
    [[nodiscard]] int predict(std::span<const double> series) const { return argmax(predict_proba(series)); }
    [[nodiscard]] std::vector<Probabilities> predict_proba(const LabeledSeriesSet& data) const;

    /// Train-accuracy estimate used as the ensemble weight. The default runs stratified
    /// cross-validation of fresh copies of this classifier.
    [[nodiscard]] virtual TrainEstimate estimate_train(const LabeledSeriesSet& train, const EstimateOptions& options) const;
    /// True when estimate_train reuses the built model instead of retraining per fold.
    [[nodiscard]] virtual bool estimates_internally() const { return false; }

    /// Untrained copy with the same configuration but the given seed and contract.
    [[nodiscard]] virtual std::unique_ptr<Classifier> fresh(std::uint64_t seed, std::optional<Duration> contract) const = 0;

    [[nodiscard]] virtual std::optional<Duration> contract() const = 0;
    virtual void set_contract(std::optional<Duration> contract) = 0;
    [[nodiscard]] virtual Duration build_time() const = 0;

    virtual void save_state(std::ostream& out) const = 0;
    virtual void load_state(std::istream& in) = 0;
  };

  /// Cheap identity of a train set, stored in checkpoints to reject resuming on other data.
  std::uint64_t fingerprint(const LabeledSeriesSet& data);

  /// Throws unless `series` has the expected length.
  void require_length(std::span<const double> series, std::size_t expected);

} // namespace hivecote
