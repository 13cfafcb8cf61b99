#pragma once

#include <hivecote/classifier.hpp>
#include <hivecote/random.hpp>
#include <hivecote/tree.hpp>

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace hivecote {

  struct TsfConfig {
    std::size_t tree_count{500};
    std::size_t min_interval_length{3};
    /// 0 selects floor(sqrt(m)), at least 1.
    std::size_t intervals_per_tree{0};
    std::uint64_t seed{0};
    std::optional<Duration> contract{};
  };

  struct IntervalFeatures {
    double mean{0.0};
    double stddev{0.0};
    double slope{0.0};
  };

  /// Mean, population standard deviation and least-squares slope against positions
  /// 0..len-1 of `series[interval]`.
  IntervalFeatures interval_features(std::span<const double> series, const Interval& interval);

  /// Random interval of length >= min_length: start uniform in [0, m - p], end uniform in
  /// [start + p - 1, m - 1]. When m <= p the whole series is returned.
  Interval sample_interval(std::size_t m, std::size_t min_length, Rng& rng);

  /// Number of intervals of length >= 2 in a series of length m.
  constexpr std::size_t interval_count(std::size_t m) { return m * (m - 1) / 2; }

  /// Time Series Forest: every tree sees the (mean, stddev, slope) of its own r random
  /// intervals. Prediction is the fraction of tree votes per class.
  class Tsf final : public Classifier {
  public:
    struct Member {
      std::vector<Interval> intervals;
      DecisionTree tree;
    };

    Tsf() = default;
    explicit Tsf(TsfConfig config);

    [[nodiscard]] std::string name() const override { return "TSF"; }
    [[nodiscard]] std::string parameters() const override;

    BuildStatus build(const LabeledSeriesSet& train, const BuildControl& control = {}) override;
    [[nodiscard]] bool is_built() const override { return complete_; }
    [[nodiscard]] std::size_t units_built() const override { return members_.size(); }

    using Classifier::predict_proba;
    [[nodiscard]] Probabilities predict_proba(std::span<const double> series) const override;

    [[nodiscard]] std::unique_ptr<Classifier> fresh(std::uint64_t seed, std::optional<Duration> contract) const override;
    [[nodiscard]] std::optional<Duration> contract() const override { return config_.contract; }
    void set_contract(std::optional<Duration> contract) override;
    [[nodiscard]] Duration build_time() const override { return clock_.accumulated(); }

    void save_state(std::ostream& out) const override;
    void load_state(std::istream& in) override;

    [[nodiscard]] const TsfConfig& config() const { return config_; }
    [[nodiscard]] const std::vector<Member>& members() const { return members_; }
    [[nodiscard]] std::size_t intervals_per_tree() const { return intervals_; }

    /// The 3r-column matrix a member with these intervals is trained on.
    static FeatureMatrix interval_matrix(const LabeledSeriesSet& data, std::span<const Interval> intervals);

  private:
    TsfConfig config_{};
    std::vector<Member> members_;
    std::size_t intervals_{0};
    std::size_t series_length_{0};
    std::size_t class_count_{0};
    std::uint64_t train_fingerprint_{0};
    bool complete_{false};
    ContractClock clock_{};
  };

} // namespace hivecote
