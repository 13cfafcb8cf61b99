#pragma once

#include <hivecote/classifier.hpp>
#include <hivecote/random.hpp>
#include <hivecote/rotation_forest.hpp>

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace hivecote {

  struct Shapelet {
    /// z-normalised subsequence
    std::vector<double> values;
    std::size_t series_index{0};
    std::size_t start{0};
    double quality{0.0};
    int target_class{0};
    /// generation order; earlier wins quality ties
    std::uint64_t id{0};

    [[nodiscard]] std::size_t length() const { return values.size(); }
    [[nodiscard]] std::size_t end() const { return start + values.size() - 1; }

    template<class Archive> void serialize(Archive& ar) { ar(values, series_index, start, quality, target_class, id); }
  };

  /// Minimum over alignments of the squared Euclidean distance between `shapelet` and the
  /// z-normalised window, divided by the shapelet length.
  double shapelet_distance(std::span<const double> shapelet, std::span<const double> series);

  struct SplitGain {
    double gain{0.0};
    double threshold{0.0};
  };

  /// One-vs-all information gain of the best distance threshold. Candidates are midpoints
  /// between consecutive distinct distances; the lowest threshold wins ties. Throws unless
  /// both the positive class and the rest are present.
  SplitGain information_gain(std::span<const double> distances, std::span<const int> labels, int positive_class);

  /// A shapelet with its distances to every training series.
  struct EvaluatedShapelet {
    Shapelet shapelet;
    std::vector<double> distances;

    template<class Archive> void serialize(Archive& ar) { ar(shapelet, distances); }
  };

  /// n * sum_{L = min_length..m} (m - L + 1)
  std::size_t total_shapelet_count(std::size_t n, std::size_t m, std::size_t min_length);

  /// Samples `budget` shapelets (series, then length in [min_length, m], then start, all
  /// uniform) or, when the budget covers the whole space, enumerates every shapelet once in
  /// (series, length, start) order. Each is scored by one-vs-all information gain with its
  /// source series' class as the positive class. Ids start at `first_id`.
  std::vector<EvaluatedShapelet> sample_and_evaluate(const LabeledSeriesSet& train, std::size_t budget,
                                                     std::size_t min_length, Rng& rng, std::uint64_t first_id = 0);

  /// Quality descending, earlier id first on ties.
  void sort_by_quality(std::vector<EvaluatedShapelet>& shapelets);

  /// Greedy scan over quality-sorted candidates: a shapelet is dropped when an already kept
  /// one comes from the same series and their index ranges overlap.
  std::vector<EvaluatedShapelet> remove_self_similar(std::vector<EvaluatedShapelet> candidates);

  /// Stable merge of two quality-sorted lists truncated to `capacity`; pool members win ties.
  std::vector<EvaluatedShapelet> merge_pool(std::vector<EvaluatedShapelet> pool, std::vector<EvaluatedShapelet> batch,
                                            std::size_t capacity);

  /// Distance from every series to every shapelet; labels carried through.
  FeatureMatrix shapelet_transform(const LabeledSeriesSet& data, std::span<const Shapelet> shapelets);

  /// Running mean of seconds per evaluated shapelet.
  class ShapeletTimingModel {
  public:
    void observe(std::size_t shapelets, double seconds);
    [[nodiscard]] bool empty() const { return shapelets_ == 0; }
    [[nodiscard]] double seconds_per_shapelet() const;

    /// remaining / estimate clamped to [1, 10000]; 100 before any observation.
    [[nodiscard]] std::size_t round_budget(Duration remaining) const;

    template<class Archive> void serialize(Archive& ar) { ar(shapelets_, seconds_); }

  private:
    std::size_t shapelets_{0};
    double seconds_{0.0};
  };

  struct StcConfig {
    std::size_t max_shapelets{1000};
    Duration search_time{std::chrono::hours(1)};
    std::size_t min_shapelet_length{3};
    std::uint64_t seed{0};
    RotationForestConfig forest{};
    /// When non-empty, round r evaluates budget_schedule[r] shapelets and the search ends
    /// after the last entry; the clock is ignored. Makes the build deterministic.
    std::vector<std::size_t> budget_schedule{};
  };

  /// Shapelet Transform Classifier. The search is bounded by `search_time`; the transform and
  /// rotation forest that follow are not.
  class Stc final : public Classifier {
  public:
    Stc() = default;
    explicit Stc(StcConfig config);

    [[nodiscard]] std::string name() const override { return "STC"; }
    [[nodiscard]] std::string parameters() const override;

    BuildStatus build(const LabeledSeriesSet& train, const BuildControl& control = {}) override;
    [[nodiscard]] bool is_built() const override { return !forest_.empty(); }
    /// Search rounds completed.
    [[nodiscard]] std::size_t units_built() const override { return rounds_; }

    using Classifier::predict_proba;
    [[nodiscard]] Probabilities predict_proba(std::span<const double> series) const override;

    /// Cross-validation of the rotation forest on the transformed train set (the pool is reused).
    [[nodiscard]] TrainEstimate estimate_train(const LabeledSeriesSet& train, const EstimateOptions& options) const override;

    [[nodiscard]] std::unique_ptr<Classifier> fresh(std::uint64_t seed, std::optional<Duration> contract) const override;
    /// The shapelet search time.
    [[nodiscard]] std::optional<Duration> contract() const override { return config_.search_time; }
    void set_contract(std::optional<Duration> contract) override;
    [[nodiscard]] Duration build_time() const override { return search_clock_.accumulated() + forest_time_; }
    [[nodiscard]] Duration search_time_used() const { return search_clock_.accumulated(); }

    void save_state(std::ostream& out) const override;
    void load_state(std::istream& in) override;

    [[nodiscard]] const StcConfig& config() const { return config_; }
    [[nodiscard]] std::vector<Shapelet> shapelets() const;
    [[nodiscard]] const std::vector<EvaluatedShapelet>& pool() const { return pool_; }
    [[nodiscard]] bool search_complete() const { return search_done_; }
    [[nodiscard]] bool fully_enumerated() const { return enumerated_; }
    [[nodiscard]] std::size_t shapelets_evaluated() const { return static_cast<std::size_t>(next_id_); }
    [[nodiscard]] const RotationForest& forest() const { return forest_; }

    /// Train transform assembled from the pool's stored distances.
    [[nodiscard]] FeatureMatrix train_transform() const;

  private:
    StcConfig config_{};
    std::vector<EvaluatedShapelet> pool_;
    ShapeletTimingModel timing_{};
    RotationForest forest_{};
    std::vector<int> train_labels_;
    std::size_t rounds_{0};
    std::uint64_t next_id_{0};
    bool search_done_{false};
    bool enumerated_{false};
    std::size_t series_length_{0};
    std::size_t class_count_{0};
    std::uint64_t train_fingerprint_{0};
    ContractClock search_clock_{};
    Duration forest_time_{0};
  };

} // namespace hivecote
