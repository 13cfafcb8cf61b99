#pragma once

#include <hivecote/classifier.hpp>
#include <hivecote/random.hpp>

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace hivecote {

  struct BossParams {
    std::size_t word_length{8};
    std::size_t alphabet_size{4};
    std::size_t window_length{16};
    bool normalise{true};

    /// Throws std::invalid_argument unless the parameters are usable on series of length m.
    void validate(std::size_t m) const;
    [[nodiscard]] bool valid_for(std::size_t m) const;

    friend bool operator==(const BossParams&, const BossParams&) = default;
    template<class Archive> void serialize(Archive& ar) { ar(word_length, alphabet_size, window_length, normalise); }
  };

  /// l/2 consecutive DFT coefficients of `window` as interleaved (re, im) pairs, starting at
  /// coefficient 1 when `normalised` (the DC term is dropped) and at 0 otherwise.
  std::vector<double> truncated_dft(std::span<const double> window, std::size_t word_length, bool normalised);

  /// The truncated DFT of every length-w window of `series` (z-normalised first when
  /// params.normalise), computed with the momentary Fourier transform. Row-major,
  /// (m - w + 1) x l.
  std::vector<double> sliding_window_coefficients(std::span<const double> series, const BossParams& params);

  /// Per coefficient slot, alphabet_size - 1 non-decreasing thresholds.
  struct McbBreakpoints {
    std::vector<std::vector<double>> rows;

    /// Symbol of `value` in slot `slot`: the number of thresholds <= value.
    [[nodiscard]] std::size_t symbol(std::size_t slot, double value) const;

    template<class Archive> void serialize(Archive& ar) { ar(rows); }
  };

  /// Equi-depth thresholds: threshold b of a slot is the linear-interpolated b/a quantile of
  /// that slot's values over every window of every training series.
  McbBreakpoints fit_mcb(const LabeledSeriesSet& train, const BossParams& params);
  McbBreakpoints fit_mcb(std::span<const std::vector<double>> coefficient_sets, const BossParams& params);

  /// Linear-interpolation quantile of sorted values (position (n - 1) q).
  double interpolated_quantile(std::span<const double> sorted, double q);

  using Word = std::uint64_t;

  /// Packs symbols, ceil(log2 a) bits each, first symbol lowest.
  Word pack_word(std::span<const std::size_t> symbols, std::size_t alphabet_size);

  /// Sparse word histogram, sorted by word.
  class BagOfWords {
  public:
    BagOfWords() = default;
    /// Builds from a word sequence, dropping any word equal to the one before it.
    static BagOfWords from_sequence(std::span<const Word> words, bool numerosity_reduction = true);
    static BagOfWords from_counts(std::vector<std::pair<Word, std::uint32_t>> counts);

    [[nodiscard]] std::uint32_t count(Word w) const;
    [[nodiscard]] std::size_t total() const;
    [[nodiscard]] const std::vector<std::pair<Word, std::uint32_t>>& entries() const { return entries_; }
    [[nodiscard]] std::size_t distinct() const { return entries_.size(); }

    friend bool operator==(const BagOfWords&, const BagOfWords&) = default;
    template<class Archive> void serialize(Archive& ar) { ar(entries_); }

  private:
    std::vector<std::pair<Word, std::uint32_t>> entries_;
  };

  /// The SFA word of every window, before numerosity reduction.
  std::vector<Word> series_to_words(std::span<const double> series, const BossParams& params, const McbBreakpoints& breakpoints);

  BagOfWords series_to_bag(std::span<const double> series, const BossParams& params, const McbBreakpoints& breakpoints);

  /// Squared Euclidean distance over the words present in `query` only. Not symmetric.
  double boss_distance(const BagOfWords& query, const BagOfWords& reference);

  /// One BOSS 1-NN member: breakpoints, a bag per training case and their labels.
  class BaseBoss {
  public:
    BaseBoss() = default;
    static BaseBoss fit(const LabeledSeriesSet& train, const BossParams& params);

    [[nodiscard]] BagOfWords transform(std::span<const double> series) const;

    /// Label of the nearest training bag, lowest index on ties. `exclude` skips one case.
    [[nodiscard]] int predict_bag(const BagOfWords& query, std::optional<std::size_t> exclude = std::nullopt) const;
    [[nodiscard]] int predict(std::span<const double> series) const { return predict_bag(transform(series)); }

    /// Leave-one-out 1-NN accuracy on the training bags, self-match excluded.
    [[nodiscard]] double loo_accuracy() const;

    [[nodiscard]] const BossParams& params() const { return params_; }
    [[nodiscard]] const McbBreakpoints& breakpoints() const { return breakpoints_; }
    [[nodiscard]] const std::vector<BagOfWords>& bags() const { return bags_; }
    [[nodiscard]] const std::vector<int>& labels() const { return labels_; }

    template<class Archive> void serialize(Archive& ar) { ar(params_, breakpoints_, bags_, labels_); }

  private:
    BossParams params_{};
    McbBreakpoints breakpoints_{};
    std::vector<BagOfWords> bags_;
    std::vector<int> labels_;
  };

  /// Keep-the-best-k bookkeeping of the cBOSS build loop. The first k offers are always
  /// accepted; afterwards an offer replaces the current lowest accuracy only if strictly
  /// greater. The lowest is the first slot holding the minimum.
  class EnsembleRetention {
  public:
    explicit EnsembleRetention(std::size_t capacity = 1) : capacity_(capacity) {}

    /// Slot the new member goes into (== size() means append), or nullopt if rejected.
    std::optional<std::size_t> offer(double accuracy);

    [[nodiscard]] const std::vector<double>& accuracies() const { return accuracies_; }
    [[nodiscard]] std::size_t size() const { return accuracies_.size(); }
    [[nodiscard]] std::size_t capacity() const { return capacity_; }
    [[nodiscard]] double min_accuracy() const { return min_accuracy_; }
    [[nodiscard]] std::size_t min_index() const { return min_index_; }

    template<class Archive> void serialize(Archive& ar) { ar(capacity_, accuracies_, min_accuracy_, min_index_); }

  private:
    std::size_t capacity_;
    std::vector<double> accuracies_;
    double min_accuracy_{std::numeric_limits<double>::infinity()};
    std::size_t min_index_{0};
  };

  struct CBossConfig {
    std::size_t max_ensemble_size{50};
    std::size_t parameter_samples{250};
    double subsample_proportion{0.7};
    std::uint64_t seed{0};
    std::optional<Duration> contract{};
  };

  /// Every valid combination of w in [10, m], l in {16, 14, 12, 10, 8}, a = 4 and z in {true, false}.
  std::vector<BossParams> cboss_parameter_space(std::size_t m);

  /// Contractable BOSS: randomly sampled parameters, subsampled train data per member, a
  /// fixed-size ensemble of the most accurate members weighted by accuracy^4.
  class CBoss final : public Classifier {
  public:
    struct Member {
      BaseBoss boss;
      double accuracy{0.0};
      double weight{0.0};
      std::vector<std::size_t> subsample;
    };

    CBoss() = default;
    explicit CBoss(CBossConfig config);

    [[nodiscard]] std::string name() const override { return "cBOSS"; }
    [[nodiscard]] std::string parameters() const override;

    BuildStatus build(const LabeledSeriesSet& train, const BuildControl& control = {}) override;
    [[nodiscard]] bool is_built() const override { return complete_; }
    /// Parameter samples evaluated so far.
    [[nodiscard]] std::size_t units_built() const override { return samples_done_; }

    using Classifier::predict_proba;
    [[nodiscard]] Probabilities predict_proba(std::span<const double> series) const override;

    /// Internal estimate: each member votes on every train case, using its leave-one-out
    /// prediction for cases in its own subsample; votes are weighted as at test time.
    [[nodiscard]] TrainEstimate estimate_train(const LabeledSeriesSet& train, const EstimateOptions& options) const override;
    [[nodiscard]] bool estimates_internally() const override { return true; }

    [[nodiscard]] std::unique_ptr<Classifier> fresh(std::uint64_t seed, std::optional<Duration> contract) const override;
    [[nodiscard]] std::optional<Duration> contract() const override { return config_.contract; }
    void set_contract(std::optional<Duration> contract) override;
    [[nodiscard]] Duration build_time() const override { return clock_.accumulated(); }

    void save_state(std::ostream& out) const override;
    void load_state(std::istream& in) override;

    [[nodiscard]] const CBossConfig& config() const { return config_; }
    [[nodiscard]] const std::vector<Member>& members() const { return members_; }
    /// Parameter combinations in the order they are sampled.
    [[nodiscard]] const std::vector<BossParams>& sample_order() const { return order_; }

    /// Class scores from weighted member votes; uniform when every weight is zero.
    [[nodiscard]] Probabilities combine_votes(std::span<const int> votes) const;

  private:
    std::vector<std::size_t> draw_subsample(const LabeledSeriesSet& train, Rng& rng) const;

    CBossConfig config_{};
    std::vector<Member> members_;
    std::vector<BossParams> order_;
    EnsembleRetention retention_{};
    std::size_t samples_done_{0};
    std::size_t series_length_{0};
    std::size_t class_count_{0};
    std::uint64_t train_fingerprint_{0};
    bool complete_{false};
    ContractClock clock_{};
  };

} // namespace hivecote
