#pragma once

// Minimal classifiers with behaviour that is easy to reason about by hand.

#include <hivecote/classifier.hpp>

#include <algorithm>
#include <istream>
#include <limits>
#include <ostream>

namespace hivecote::testing {

  class StubClassifier final : public Classifier {
  public:
    enum class Mode { majority, nearest_neighbour };

    StubClassifier(std::string name, Mode mode, bool internal = false) : name_(std::move(name)), mode_(mode), internal_(internal) {}

    [[nodiscard]] std::string name() const override { return name_; }
    [[nodiscard]] std::string parameters() const override { return name_ + ",stub"; }

    BuildStatus build(const LabeledSeriesSet& train, const BuildControl& = {}) override {
      train_ = train;
      built_ = true;
      ++builds;
      return BuildStatus::complete;
    }
    [[nodiscard]] bool is_built() const override { return built_; }
    [[nodiscard]] std::size_t units_built() const override { return built_ ? 1 : 0; }

    using Classifier::predict_proba;
    [[nodiscard]] Probabilities predict_proba(std::span<const double> series) const override {
      Probabilities p(train_.class_count(), 0.0);
      if (mode_ == Mode::majority) {
        const auto counts = train_.class_counts();
        p[static_cast<std::size_t>(std::max_element(counts.begin(), counts.end()) - counts.begin())] = 1.0;
        return p;
      }
      double best = std::numeric_limits<double>::infinity();
      int label = 0;
      for (std::size_t i = 0; i < train_.size(); ++i) {
        double d = 0.0;
        const auto s = train_.series(i);
        for (std::size_t t = 0; t < s.size(); ++t) { d += (s[t] - series[t]) * (s[t] - series[t]); }
        if (d < best) {
          best = d;
          label = train_.label(i);
        }
      }
      p[static_cast<std::size_t>(label)] = 1.0;
      return p;
    }

    [[nodiscard]] bool estimates_internally() const override { return internal_; }
    [[nodiscard]] TrainEstimate estimate_train(const LabeledSeriesSet& train, const EstimateOptions& options) const override {
      last_budget = options.budget;
      return Classifier::estimate_train(train, options);
    }

    [[nodiscard]] std::unique_ptr<Classifier> fresh(std::uint64_t, std::optional<Duration> contract) const override {
      auto copy = std::make_unique<StubClassifier>(name_, mode_, internal_);
      copy->contract_ = contract;
      return copy;
    }
    [[nodiscard]] std::optional<Duration> contract() const override { return contract_; }
    void set_contract(std::optional<Duration> contract) override { contract_ = contract; }
    [[nodiscard]] Duration build_time() const override { return Duration::zero(); }

    void save_state(std::ostream&) const override {}
    void load_state(std::istream&) override {}

    int builds{0};
    mutable std::optional<Duration> last_budget{};

  private:
    std::string name_;
    Mode mode_;
    bool internal_;
    bool built_{false};
    LabeledSeriesSet train_{};
    std::optional<Duration> contract_{};
  };

} // namespace hivecote::testing
