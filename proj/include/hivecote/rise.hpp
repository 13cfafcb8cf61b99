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

  struct RiseConfig {
    std::size_t tree_count{500};
    /// 0 selects min(16, floor(m/2)), at least 2.
    std::size_t min_interval_length{0};
    std::size_t max_acf_lags{100};
    /// 0 selects floor(sqrt(d)).
    std::size_t attributes_per_split{0};
    std::uint64_t seed{0};
    std::optional<Duration> contract{};
  };

  /// Predicts the cost of one tree from its interval length: least squares of seconds
  /// against r log2 r with an intercept, refitted on every observation. Predicts 0 until
  /// two observations exist. The slope is clamped at 0 so predictions never fall as r grows.
  class TimingModel {
  public:
    void observe(std::size_t interval_length, double seconds);
    [[nodiscard]] double predict(std::size_t interval_length) const;
    [[nodiscard]] std::size_t observations() const { return lengths_.size(); }

    /// Largest length in [1, m] whose predicted cost is within `allowance_seconds`, or 0.
    [[nodiscard]] std::size_t max_affordable_length(std::size_t m, double allowance_seconds) const;

    /// Fixes the model to cost = intercept + slope * r log2 r (testing).
    void set_coefficients(double intercept, double slope);

    template<class Archive> void serialize(Archive& ar) { ar(lengths_, seconds_, intercept_, slope_, fixed_); }

  private:
    void refit();

    std::vector<std::size_t> lengths_;
    std::vector<double> seconds_;
    double intercept_{0.0};
    double slope_{0.0};
    bool fixed_{false};
  };

  /// Interval for tree `tree_index` (1-based). Tree 1 spans the series; later trees use a
  /// uniformly chosen power of two in [p, max], where max is the largest power of two not
  /// above m nor above what the timing model says fits into an equal share of the remaining
  /// time. Falls back to length p when no power of two qualifies.
  Interval choose_interval(std::size_t tree_index, std::size_t tree_count, std::size_t m, std::size_t min_length,
                           const TimingModel& timing, std::optional<Duration> remaining, Rng& rng);

  /// Random Interval Spectral Ensemble: one interval per tree, power spectrum and
  /// autocorrelation features, random trees, probability = fraction of tree votes.
  class Rise final : public Classifier {
  public:
    struct Member {
      Interval interval;
      DecisionTree tree;
    };

    Rise() = default;
    explicit Rise(RiseConfig config);

    [[nodiscard]] std::string name() const override { return "RISE"; }
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

    [[nodiscard]] const RiseConfig& config() const { return config_; }
    [[nodiscard]] const std::vector<Member>& members() const { return members_; }
    [[nodiscard]] const TimingModel& timing() const { return timing_; }
    [[nodiscard]] std::size_t min_interval_length() const { return min_length_; }

  private:
    RiseConfig config_{};
    std::vector<Member> members_;
    TimingModel timing_{};
    std::size_t min_length_{0};
    std::size_t series_length_{0};
    std::size_t class_count_{0};
    std::uint64_t train_fingerprint_{0};
    bool complete_{false};
    ContractClock clock_{};
  };

} // namespace hivecote
