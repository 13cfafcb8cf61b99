#pragma once

#include <hivecote/checkpoint.hpp>
#include <hivecote/classifier.hpp>
#include <hivecote/results.hpp>

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace hivecote {

  struct Combination {
    Probabilities probabilities;
    int prediction{0};
  };

  /// score_j = sum_i w_i^alpha * q_ij, normalised to sum 1; prediction is the argmax
  /// (lowest index on ties). Throws when every weight is zero or the vectors are malformed.
  Combination combine_probabilities(std::span<const Probabilities> component_probs, std::span<const double> weights,
                                    double alpha);

  /// Equal weights when every weight is zero (no component beat chance on train), otherwise
  /// the weights unchanged. Applied by the ensemble and the from-file builder alike.
  std::vector<double> usable_weights(std::vector<double> weights);

  struct HiveCoteConfig {
    std::vector<std::string> components{"TSF", "RISE", "cBOSS", "STC"};
    double alpha{4.0};
    /// Total train-time contract. Sequential mode gives each component contract / K,
    /// thread mode gives each the whole contract.
    std::optional<Duration> contract{};
    bool threaded{false};
    std::size_t cv_folds{10};
    std::uint64_t seed{0};
  };

  struct TrainedComponent {
    std::string name;
    std::unique_ptr<Classifier> classifier;
    /// Quantised so it matches the component's train file exactly.
    TrainEstimate estimate;
    bool estimated{false};
    /// Wall time of the component build, excluding the weight estimate.
    Duration build_duration{0};
    /// Time slice granted to the component (build plus estimate); nullopt when uncontracted.
    std::optional<Duration> slice{};
  };

  /// HIVE-COTE: CAWPE combination of TSF, RISE, cBOSS and STC.
  ///
  /// Within a contracted slice a component that has to be cross-validated gets half the
  /// slice for its build and the other half for the estimate (split across folds); cBOSS,
  /// whose estimate reuses its members, gets the whole slice for the build.
  class HiveCote final : public Classifier {
  public:
    HiveCote() : HiveCote(HiveCoteConfig{}) {}
    explicit HiveCote(HiveCoteConfig config);
    /// Uses the given (unbuilt) components instead of default-configured ones named in the config.
    HiveCote(HiveCoteConfig config, std::vector<std::unique_ptr<Classifier>> components);

    [[nodiscard]] std::string name() const override { return "HC"; }
    [[nodiscard]] std::string parameters() const override;

    /// Sequential mode builds one component at a time and honours `control.unit_limit`
    /// (counted in component base units). Thread mode ignores the unit limit.
    BuildStatus build(const LabeledSeriesSet& train, const BuildControl& control = {}) override;
    [[nodiscard]] bool is_built() const override { return next_component_ == components_.size(); }
    [[nodiscard]] std::size_t units_built() const override;

    using Classifier::predict_proba;
    [[nodiscard]] Probabilities predict_proba(std::span<const double> series) const override;
    [[nodiscard]] Combination classify(std::span<const double> series) const;

    /// Combination of the components' stored train estimates.
    [[nodiscard]] TrainEstimate estimate_train(const LabeledSeriesSet& train, const EstimateOptions& options) const override;
    [[nodiscard]] bool estimates_internally() const override { return true; }

    [[nodiscard]] std::unique_ptr<Classifier> fresh(std::uint64_t seed, std::optional<Duration> contract) const override;
    [[nodiscard]] std::optional<Duration> contract() const override { return config_.contract; }
    void set_contract(std::optional<Duration> contract) override;
    [[nodiscard]] Duration build_time() const override { return build_time_; }

    void save_state(std::ostream& out) const override;
    void load_state(std::istream& in) override;

    /// A header section followed by one section per component.
    [[nodiscard]] std::vector<CheckpointSection> checkpoint_sections() const;
    void restore_sections(const std::vector<CheckpointSection>& sections);

    [[nodiscard]] const HiveCoteConfig& config() const { return config_; }
    [[nodiscard]] const std::vector<TrainedComponent>& components() const { return components_; }
    [[nodiscard]] std::vector<double> weights() const;
    [[nodiscard]] const std::vector<int>& train_labels() const { return train_labels_; }
    /// Slice each component receives under the current configuration.
    [[nodiscard]] std::optional<Duration> component_slice() const;

  private:
    void allocate_contracts();
    void build_component(TrainedComponent& component, std::size_t index, const LabeledSeriesSet& train);
    void estimate_component(TrainedComponent& component, std::size_t index, const LabeledSeriesSet& train);
    std::string header_state() const;
    void restore_header(const std::string& payload, std::vector<std::string>& names);

    HiveCoteConfig config_{};
    std::vector<TrainedComponent> components_;
    std::size_t next_component_{0};
    bool allocated_{false};
    std::size_t series_length_{0};
    std::size_t class_count_{0};
    std::uint64_t train_fingerprint_{0};
    std::vector<int> train_labels_;
    Duration build_time_{0};
  };

  /// Combiner assembled from results files.
  struct ResultsEnsemble {
    std::vector<std::string> components;
    std::vector<double> weights;
    double alpha{4.0};
    std::vector<int> truth;
    std::vector<Probabilities> probabilities;
    std::vector<int> predictions;
    double accuracy{0.0};
  };

  /// {root}/{classifier}/Predictions/{dataset}/{split}Fold{file_fold}.csv
  std::filesystem::path results_file_path(const std::filesystem::path& root, const std::string& classifier,
                                          const std::string& dataset, const std::string& split, int file_fold);

  /// Weights from each component's trainFold file, predictions from its testFold file.
  /// `fold` is the file index (0-based).
  ResultsEnsemble build_from_results_files(const std::filesystem::path& root, const std::string& dataset, int fold,
                                           const std::vector<std::string>& component_names, double alpha);

  /// Alpha from `grid` giving the best combined accuracy on the train files; the smallest
  /// such alpha wins ties.
  double tune_alpha(const std::filesystem::path& root, const std::string& dataset, int fold,
                    const std::vector<std::string>& component_names, const std::vector<double>& grid);

} // namespace hivecote
