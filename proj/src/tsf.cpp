#include <hivecote/tsf.hpp>

#include "serialization.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace hivecote {

  IntervalFeatures interval_features(std::span<const double> series, const Interval& interval) {
    if (interval.start > interval.end || interval.end >= series.size()) {
      throw std::invalid_argument("interval outside series bounds");
    }
    const auto values = series.subspan(interval.start, interval.length());
    const std::size_t len = values.size();
    if (len == 1) { return {values[0], 0.0, 0.0}; }
    const auto [mean, sd] = mean_and_std(values);
    const double t_mean = static_cast<double>(len - 1) / 2.0;
    double sxy = 0.0;
    double sxx = 0.0;
    for (std::size_t t = 0; t < len; ++t) {
      const double dt = static_cast<double>(t) - t_mean;
      sxy += dt * (values[t] - mean);
      sxx += dt * dt;
    }
    return {mean, sd, sxy / sxx};
  }

  Interval sample_interval(std::size_t m, std::size_t min_length, Rng& rng) {
    if (m <= min_length) { return {0, m - 1}; }
    const std::size_t start = uniform_between(rng, 0, m - min_length);
    const std::size_t end = uniform_between(rng, start + min_length - 1, m - 1);
    return {start, end};
  }

  Tsf::Tsf(TsfConfig config) : config_(config), clock_(config.contract) {
    if (config_.tree_count < 1) { throw std::invalid_argument("TSF needs at least one tree"); }
    if (config_.min_interval_length < 3) { throw std::invalid_argument("TSF minimum interval length must be >= 3"); }
  }

  std::string Tsf::parameters() const {
    std::ostringstream s;
    s << "TSF,trees," << config_.tree_count << ",minInterval," << config_.min_interval_length << ",intervalsPerTree,"
      << intervals_ << ",seed," << config_.seed << ",contractNanos," << detail::encode_duration(config_.contract)
      << ",treesBuilt," << members_.size();
    return s.str();
  }

  FeatureMatrix Tsf::interval_matrix(const LabeledSeriesSet& data, std::span<const Interval> intervals) {
    FeatureMatrix x(data.size(), 3 * intervals.size(), data.labels(), data.class_count());
    for (std::size_t i = 0; i < data.size(); ++i) {
      const auto s = data.series(i);
      for (std::size_t j = 0; j < intervals.size(); ++j) {
        const auto f = interval_features(s, intervals[j]);
        x.at(i, 3 * j) = f.mean;
        x.at(i, 3 * j + 1) = f.stddev;
        x.at(i, 3 * j + 2) = f.slope;
      }
    }
    return x;
  }

  BuildStatus Tsf::build(const LabeledSeriesSet& train, const BuildControl& control) {
    if (members_.empty() && !complete_) {
      train.require_all_classes();
      series_length_ = train.series_length();
      class_count_ = train.class_count();
      train_fingerprint_ = fingerprint(train);
      intervals_ = config_.intervals_per_tree > 0
        ? config_.intervals_per_tree
        : std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(std::sqrt(static_cast<double>(series_length_)))));
    } else if (fingerprint(train) != train_fingerprint_) {
      throw std::invalid_argument("TSF resumed on a different train set");
    }
    if (complete_) { return BuildStatus::complete; }

    clock_.start();
    std::size_t added = 0;
    while (members_.size() < config_.tree_count && (members_.empty() || clock_.time_remaining())) {
      if (control.unit_limit && added >= *control.unit_limit) {
        clock_.stop();
        return BuildStatus::paused;
      }
      Rng rng = make_rng(config_.seed, members_.size());
      Member member;
      member.intervals.reserve(intervals_);
      for (std::size_t j = 0; j < intervals_; ++j) {
        member.intervals.push_back(sample_interval(series_length_, config_.min_interval_length, rng));
      }
      member.tree = build_time_series_tree(interval_matrix(train, member.intervals));
      members_.push_back(std::move(member));
      ++added;
    }
    clock_.stop();
    complete_ = true;
    return BuildStatus::complete;
  }

  Probabilities Tsf::predict_proba(std::span<const double> series) const {
    if (members_.empty()) { throw std::logic_error("TSF has not been built"); }
    require_length(series, series_length_);
    std::vector<int> votes;
    votes.reserve(members_.size());
    std::vector<double> row;
    for (const auto& m: members_) {
      row.clear();
      for (const auto& iv: m.intervals) {
        const auto f = interval_features(series, iv);
        row.push_back(f.mean);
        row.push_back(f.stddev);
        row.push_back(f.slope);
      }
      votes.push_back(m.tree.vote(row));
    }
    return vote_distribution(votes, class_count_);
  }

  std::unique_ptr<Classifier> Tsf::fresh(std::uint64_t seed, std::optional<Duration> contract) const {
    TsfConfig c = config_;
    c.seed = seed;
    c.contract = contract;
    return std::make_unique<Tsf>(c);
  }

  void Tsf::set_contract(std::optional<Duration> contract) {
    config_.contract = contract;
    clock_.set_limit(contract);
  }

  void Tsf::save_state(std::ostream& out) const {
    cereal::PortableBinaryOutputArchive ar(out);
    ar(config_.tree_count, config_.min_interval_length, config_.intervals_per_tree, config_.seed,
       detail::encode_duration(config_.contract));
    ar(intervals_, series_length_, class_count_, train_fingerprint_, complete_, clock_.accumulated().count());
    ar(static_cast<std::uint64_t>(members_.size()));
    for (const auto& m: members_) { ar(m.intervals, m.tree); }
  }

  void Tsf::load_state(std::istream& in) {
    detail::guarded_load([&] {
      cereal::PortableBinaryInputArchive ar(in);
      TsfConfig c;
      std::int64_t contract = -1;
      ar(c.tree_count, c.min_interval_length, c.intervals_per_tree, c.seed, contract);
      c.contract = detail::decode_duration(contract);
      Tsf restored(c);
      std::int64_t elapsed = 0;
      ar(restored.intervals_, restored.series_length_, restored.class_count_, restored.train_fingerprint_,
         restored.complete_, elapsed);
      restored.clock_.set_elapsed(Duration(elapsed));
      std::uint64_t count = 0;
      ar(count);
      for (std::uint64_t k = 0; k < count; ++k) {
        Member m;
        ar(m.intervals, m.tree);
        restored.members_.push_back(std::move(m));
      }
      *this = std::move(restored);
    });
  }

} // namespace hivecote
