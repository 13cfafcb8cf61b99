#include <hivecote/rise.hpp>
#include <hivecote/spectral.hpp>

#include "serialization.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace hivecote {

  namespace {

    double cost_term(std::size_t r) {
      const auto x = static_cast<double>(r);
      return r <= 1 ? 0.0 : x * std::log2(x);
    }

  } // namespace

  void TimingModel::observe(std::size_t interval_length, double seconds) {
    lengths_.push_back(interval_length);
    seconds_.push_back(seconds);
    if (!fixed_) { refit(); }
  }

  void TimingModel::refit() {
    const std::size_t n = lengths_.size();
    if (n < 2) { return; }
    double mx = 0.0;
    double my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      mx += cost_term(lengths_[i]);
      my += seconds_[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxy = 0.0;
    double sxx = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double dx = cost_term(lengths_[i]) - mx;
      sxy += dx * (seconds_[i] - my);
      sxx += dx * dx;
    }
    slope_ = sxx > 0.0 ? std::max(0.0, sxy / sxx) : 0.0;
    intercept_ = my - slope_ * mx;
  }

  double TimingModel::predict(std::size_t interval_length) const {
    if (!fixed_ && lengths_.size() < 2) { return 0.0; }
    return intercept_ + slope_ * cost_term(interval_length);
  }

  void TimingModel::set_coefficients(double intercept, double slope) {
    intercept_ = intercept;
    slope_ = std::max(0.0, slope);
    fixed_ = true;
  }

  std::size_t TimingModel::max_affordable_length(std::size_t m, double allowance_seconds) const {
    if (predict(m) <= allowance_seconds) { return m; }
    if (predict(1) > allowance_seconds) { return 0; }
    std::size_t lo = 1;
    std::size_t hi = m;
    while (hi - lo > 1) {
      const std::size_t mid = lo + (hi - lo) / 2;
      (predict(mid) <= allowance_seconds ? lo : hi) = mid;
    }
    return lo;
  }

  Interval choose_interval(std::size_t tree_index, std::size_t tree_count, std::size_t m, std::size_t min_length,
                           const TimingModel& timing, std::optional<Duration> remaining, Rng& rng) {
    if (m < min_length) { throw std::invalid_argument("series shorter than the minimum interval length"); }
    if (tree_index <= 1) { return {0, m - 1}; }

    std::size_t cap = m;
    if (remaining) {
      const std::size_t trees_left = tree_count >= tree_index ? tree_count - tree_index + 1 : 1;
      cap = std::min(cap, timing.max_affordable_length(m, to_seconds(*remaining) / static_cast<double>(trees_left)));
    }
    std::vector<std::size_t> lengths;
    for (std::size_t len = 1; len <= cap; len *= 2) {
      if (len >= min_length) { lengths.push_back(len); }
    }
    const std::size_t length = lengths.empty() ? min_length : lengths[uniform_index(rng, lengths.size())];
    const std::size_t start = uniform_between(rng, 0, m - length);
    return {start, start + length - 1};
  }

  Rise::Rise(RiseConfig config) : config_(config), clock_(config.contract) {
    if (config_.tree_count < 1) { throw std::invalid_argument("RISE needs at least one tree"); }
    if (config_.min_interval_length == 1) { throw std::invalid_argument("RISE minimum interval length must be >= 2"); }
  }

  std::string Rise::parameters() const {
    std::ostringstream s;
    s << "RISE,trees," << config_.tree_count << ",minInterval," << min_length_ << ",maxLags," << config_.max_acf_lags
      << ",seed," << config_.seed << ",contractNanos," << detail::encode_duration(config_.contract) << ",treesBuilt,"
      << members_.size();
    return s.str();
  }

  BuildStatus Rise::build(const LabeledSeriesSet& train, const BuildControl& control) {
    if (members_.empty() && !complete_) {
      train.require_all_classes();
      series_length_ = train.series_length();
      if (series_length_ < 2) { throw std::invalid_argument("RISE needs series of length >= 2"); }
      class_count_ = train.class_count();
      train_fingerprint_ = fingerprint(train);
      min_length_ = config_.min_interval_length > 0
        ? config_.min_interval_length
        : std::max<std::size_t>(2, std::min<std::size_t>(16, series_length_ / 2));
      if (min_length_ > series_length_) { throw std::invalid_argument("RISE minimum interval exceeds the series length"); }
    } else if (fingerprint(train) != train_fingerprint_) {
      throw std::invalid_argument("RISE resumed on a different train set");
    }
    if (complete_) { return BuildStatus::complete; }

    clock_.start();
    std::size_t added = 0;
    while (members_.size() < config_.tree_count && (members_.empty() || clock_.time_remaining())) {
      if (control.unit_limit && added >= *control.unit_limit) {
        clock_.stop();
        return BuildStatus::paused;
      }
      const auto tree_start = Clock::now();
      const std::size_t index = members_.size() + 1;
      Rng rng = make_rng(config_.seed, index);
      Member member;
      member.interval = choose_interval(index, config_.tree_count, series_length_, min_length_, timing_,
                                        clock_.remaining(), rng);
      const std::size_t r = member.interval.length();
      const std::size_t d = spectral_feature_count(r, config_.max_acf_lags);
      FeatureMatrix x(train.size(), d, train.labels(), class_count_);
      for (std::size_t i = 0; i < train.size(); ++i) {
        const auto f = spectral_features(train.series(i).subspan(member.interval.start, r), config_.max_acf_lags);
        std::copy(f.begin(), f.end(), x.row(i).begin());
      }
      const std::size_t per_split = config_.attributes_per_split > 0 ? std::min(config_.attributes_per_split, d)
                                                                     : default_attributes_per_split(d);
      member.tree = build_random_tree(x, per_split, rng);
      members_.push_back(std::move(member));
      timing_.observe(r, to_seconds(Clock::now() - tree_start));
      ++added;
    }
    clock_.stop();
    complete_ = true;
    return BuildStatus::complete;
  }

  Probabilities Rise::predict_proba(std::span<const double> series) const {
    if (members_.empty()) { throw std::logic_error("RISE has not been built"); }
    require_length(series, series_length_);
    std::vector<int> votes;
    votes.reserve(members_.size());
    for (const auto& m: members_) {
      const auto f = spectral_features(series.subspan(m.interval.start, m.interval.length()), config_.max_acf_lags);
      votes.push_back(m.tree.vote(f));
    }
    return vote_distribution(votes, class_count_);
  }

  std::unique_ptr<Classifier> Rise::fresh(std::uint64_t seed, std::optional<Duration> contract) const {
    RiseConfig c = config_;
    c.seed = seed;
    c.contract = contract;
    return std::make_unique<Rise>(c);
  }

  void Rise::set_contract(std::optional<Duration> contract) {
    config_.contract = contract;
    clock_.set_limit(contract);
  }

  void Rise::save_state(std::ostream& out) const {
    cereal::PortableBinaryOutputArchive ar(out);
    ar(config_.tree_count, config_.min_interval_length, config_.max_acf_lags, config_.attributes_per_split, config_.seed,
       detail::encode_duration(config_.contract));
    ar(min_length_, series_length_, class_count_, train_fingerprint_, complete_, clock_.accumulated().count(), timing_);
    ar(static_cast<std::uint64_t>(members_.size()));
    for (const auto& m: members_) { ar(m.interval, m.tree); }
  }

  void Rise::load_state(std::istream& in) {
    detail::guarded_load([&] {
      cereal::PortableBinaryInputArchive ar(in);
      RiseConfig c;
      std::int64_t contract = -1;
      ar(c.tree_count, c.min_interval_length, c.max_acf_lags, c.attributes_per_split, c.seed, contract);
      c.contract = detail::decode_duration(contract);
      Rise restored(c);
      std::int64_t elapsed = 0;
      ar(restored.min_length_, restored.series_length_, restored.class_count_, restored.train_fingerprint_,
         restored.complete_, elapsed, restored.timing_);
      restored.clock_.set_elapsed(Duration(elapsed));
      std::uint64_t count = 0;
      ar(count);
      for (std::uint64_t k = 0; k < count; ++k) {
        Member m;
        ar(m.interval, m.tree);
        restored.members_.push_back(std::move(m));
      }
      *this = std::move(restored);
    });
  }

} // namespace hivecote
