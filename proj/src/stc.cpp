#include <hivecote/cross_validation.hpp>
#include <hivecote/stc.hpp>

#include "serialization.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace hivecote {

  double shapelet_distance(std::span<const double> shapelet, std::span<const double> series) {
    const std::size_t len = shapelet.size();
    if (len == 0 || len > series.size()) { throw std::invalid_argument("shapelet longer than the series"); }
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t t = 0; t + len <= series.size(); ++t) {
      const auto window = series.subspan(t, len);
      const auto [mean, sd] = mean_and_std(window);
      double sum = 0.0;
      if (sd <= sigma_floor) {
        for (std::size_t j = 0; j < len && sum < best; ++j) { sum += shapelet[j] * shapelet[j]; }
      } else {
        for (std::size_t j = 0; j < len && sum < best; ++j) {
          const double diff = shapelet[j] - (window[j] - mean) / sd;
          sum += diff * diff;
        }
      }
      best = std::min(best, sum);
    }
    return best / static_cast<double>(len);
  }

  namespace {

    double binary_entropy(std::size_t pos, std::size_t neg) {
      const std::size_t n = pos + neg;
      if (n == 0 || pos == 0 || neg == 0) { return 0.0; }
      const double p = static_cast<double>(pos) / static_cast<double>(n);
      const double q = static_cast<double>(neg) / static_cast<double>(n);
      return -p * std::log2(p) - q * std::log2(q);
    }

  } // namespace

  SplitGain information_gain(std::span<const double> distances, std::span<const int> labels, int positive_class) {
    const std::size_t n = distances.size();
    if (n < 2 || labels.size() != n) { throw std::invalid_argument("information gain needs at least two labelled distances"); }
    std::vector<std::pair<double, bool>> sorted(n);
    std::size_t total_pos = 0;
    for (std::size_t i = 0; i < n; ++i) {
      sorted[i] = {distances[i], labels[i] == positive_class};
      total_pos += sorted[i].second ? 1 : 0;
    }
    if (total_pos == 0 || total_pos == n) { throw std::invalid_argument("information gain needs both positive and other cases"); }
    std::sort(sorted.begin(), sorted.end());

    const double parent = binary_entropy(total_pos, n - total_pos);
    SplitGain best{0.0, sorted.front().first};
    bool found = false;
    std::size_t left_pos = 0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
      left_pos += sorted[i].second ? 1 : 0;
      if (sorted[i].first == sorted[i + 1].first) { continue; }
      const std::size_t nl = i + 1;
      const std::size_t nr = n - nl;
      const double gain = parent
        - (static_cast<double>(nl) / static_cast<double>(n)) * binary_entropy(left_pos, nl - left_pos)
        - (static_cast<double>(nr) / static_cast<double>(n)) * binary_entropy(total_pos - left_pos, nr - (total_pos - left_pos));
      if (!found || gain > best.gain + 1e-12) {
        best = {gain, sorted[i].first + (sorted[i + 1].first - sorted[i].first) / 2.0};
        found = true;
      }
    }
    best.gain = std::max(0.0, best.gain);
    return best;
  }

  std::size_t total_shapelet_count(std::size_t n, std::size_t m, std::size_t min_length) {
    std::size_t per_series = 0;
    for (std::size_t len = std::max<std::size_t>(1, min_length); len <= m; ++len) { per_series += m - len + 1; }
    return n * per_series;
  }

  namespace {

    EvaluatedShapelet evaluate(const LabeledSeriesSet& train, std::size_t series_index, std::size_t start,
                               std::size_t length, std::uint64_t id) {
      EvaluatedShapelet e;
      const auto source = train.series(series_index);
      e.shapelet.values = z_normalize(source.subspan(start, length));
      e.shapelet.series_index = series_index;
      e.shapelet.start = start;
      e.shapelet.target_class = train.label(series_index);
      e.shapelet.id = id;
      e.distances.resize(train.size());
      for (std::size_t i = 0; i < train.size(); ++i) { e.distances[i] = shapelet_distance(e.shapelet.values, train.series(i)); }
      const auto& labels = train.labels();
      const bool both = std::any_of(labels.begin(), labels.end(), [&](int y) { return y == e.shapelet.target_class; })
        && std::any_of(labels.begin(), labels.end(), [&](int y) { return y != e.shapelet.target_class; });
      e.shapelet.quality = both ? information_gain(e.distances, labels, e.shapelet.target_class).gain : 0.0;
      return e;
    }

  } // namespace

  std::vector<EvaluatedShapelet> sample_and_evaluate(const LabeledSeriesSet& train, std::size_t budget,
                                                     std::size_t min_length, Rng& rng, std::uint64_t first_id) {
    const std::size_t n = train.size();
    const std::size_t m = train.series_length();
    if (min_length < 1 || min_length > m) { throw std::invalid_argument("minimum shapelet length must be in [1, m]"); }
    std::vector<EvaluatedShapelet> out;
    std::uint64_t id = first_id;
    if (budget >= total_shapelet_count(n, m, min_length)) {
      out.reserve(total_shapelet_count(n, m, min_length));
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t len = min_length; len <= m; ++len) {
          for (std::size_t start = 0; start + len <= m; ++start) { out.push_back(evaluate(train, i, start, len, id++)); }
        }
      }
      return out;
    }
    out.reserve(budget);
    for (std::size_t k = 0; k < budget; ++k) {
      const std::size_t i = uniform_index(rng, n);
      const std::size_t len = uniform_between(rng, min_length, m);
      const std::size_t start = uniform_between(rng, 0, m - len);
      out.push_back(evaluate(train, i, start, len, id++));
    }
    return out;
  }

  void sort_by_quality(std::vector<EvaluatedShapelet>& shapelets) {
    std::stable_sort(shapelets.begin(), shapelets.end(), [](const EvaluatedShapelet& a, const EvaluatedShapelet& b) {
      if (a.shapelet.quality != b.shapelet.quality) { return a.shapelet.quality > b.shapelet.quality; }
      return a.shapelet.id < b.shapelet.id;
    });
  }

  std::vector<EvaluatedShapelet> remove_self_similar(std::vector<EvaluatedShapelet> candidates) {
    std::vector<EvaluatedShapelet> kept;
    for (auto& c: candidates) {
      const auto& s = c.shapelet;
      const bool overlaps = std::any_of(kept.begin(), kept.end(), [&](const EvaluatedShapelet& k) {
        return k.shapelet.series_index == s.series_index && k.shapelet.start <= s.end() && s.start <= k.shapelet.end();
      });
      if (!overlaps) { kept.push_back(std::move(c)); }
    }
    return kept;
  }

  std::vector<EvaluatedShapelet> merge_pool(std::vector<EvaluatedShapelet> pool, std::vector<EvaluatedShapelet> batch,
                                            std::size_t capacity) {
    std::vector<EvaluatedShapelet> merged;
    merged.reserve(pool.size() + batch.size());
    std::merge(std::make_move_iterator(pool.begin()), std::make_move_iterator(pool.end()),
               std::make_move_iterator(batch.begin()), std::make_move_iterator(batch.end()), std::back_inserter(merged),
               [](const EvaluatedShapelet& a, const EvaluatedShapelet& b) { return a.shapelet.quality > b.shapelet.quality; });
    if (merged.size() > capacity) { merged.resize(capacity); }
    return merged;
  }

  FeatureMatrix shapelet_transform(const LabeledSeriesSet& data, std::span<const Shapelet> shapelets) {
    if (shapelets.empty()) { throw std::invalid_argument("shapelet transform needs at least one shapelet"); }
    FeatureMatrix x(data.size(), shapelets.size(), data.labels(), data.class_count());
    for (std::size_t i = 0; i < data.size(); ++i) {
      for (std::size_t j = 0; j < shapelets.size(); ++j) { x.at(i, j) = shapelet_distance(shapelets[j].values, data.series(i)); }
    }
    return x;
  }

  void ShapeletTimingModel::observe(std::size_t shapelets, double seconds) {
    shapelets_ += shapelets;
    seconds_ += seconds;
  }

  double ShapeletTimingModel::seconds_per_shapelet() const {
    if (shapelets_ == 0) { return 0.0; }
    return std::max(seconds_ / static_cast<double>(shapelets_), 1e-9);
  }

  std::size_t ShapeletTimingModel::round_budget(Duration remaining) const {
    if (empty()) { return 100; }
    const double estimate = to_seconds(remaining) / seconds_per_shapelet();
    return static_cast<std::size_t>(std::clamp(estimate, 1.0, 10000.0));
  }

  Stc::Stc(StcConfig config) : config_(std::move(config)), search_clock_(config_.search_time) {
    if (config_.max_shapelets < 1) { throw std::invalid_argument("STC must keep at least one shapelet"); }
    if (config_.search_time <= Duration::zero()) { throw std::invalid_argument("STC search time must be positive"); }
    if (config_.min_shapelet_length < 1) { throw std::invalid_argument("minimum shapelet length must be >= 1"); }
  }

  std::string Stc::parameters() const {
    std::ostringstream s;
    s << "STC,maxShapelets," << config_.max_shapelets << ",searchNanos," << config_.search_time.count() << ",minLength,"
      << config_.min_shapelet_length << ",seed," << config_.seed << ",forestTrees," << config_.forest.tree_count
      << ",rounds," << rounds_ << ",evaluated," << next_id_ << ",pool," << pool_.size();
    return s.str();
  }

  BuildStatus Stc::build(const LabeledSeriesSet& train, const BuildControl& control) {
    if (rounds_ == 0 && !search_done_) {
      train.require_all_classes();
      series_length_ = train.series_length();
      if (series_length_ < config_.min_shapelet_length) { throw std::invalid_argument("series shorter than the minimum shapelet length"); }
      class_count_ = train.class_count();
      train_fingerprint_ = fingerprint(train);
      train_labels_ = train.labels();
    } else if (fingerprint(train) != train_fingerprint_) {
      throw std::invalid_argument("STC resumed on a different train set");
    }
    if (is_built()) { return BuildStatus::complete; }

    const std::size_t space = total_shapelet_count(train.size(), series_length_, config_.min_shapelet_length);
    search_clock_.start();
    std::size_t added = 0;
    while (!search_done_) {
      if (rounds_ > 0 && config_.budget_schedule.empty() && !search_clock_.time_remaining()) {
        search_done_ = true;
        break;
      }
      std::size_t budget = 0;
      if (!config_.budget_schedule.empty()) {
        if (rounds_ >= config_.budget_schedule.size()) {
          search_done_ = true;
          break;
        }
        budget = std::max<std::size_t>(1, config_.budget_schedule[rounds_]);
      } else {
        budget = timing_.round_budget(*search_clock_.remaining());
      }
      if (control.unit_limit && added >= *control.unit_limit) {
        search_clock_.stop();
        return BuildStatus::paused;
      }
      const auto round_start = Clock::now();
      Rng rng = make_rng(config_.seed, rounds_ + 1);
      auto batch = sample_and_evaluate(train, budget, config_.min_shapelet_length, rng, next_id_);
      next_id_ += batch.size();
      const bool everything = budget >= space;
      sort_by_quality(batch);
      batch = remove_self_similar(std::move(batch));
      timing_.observe(budget >= space ? space : budget, to_seconds(Clock::now() - round_start));
      // a full enumeration covers anything sampled earlier, so it replaces the pool
      if (everything) { pool_.clear(); }
      pool_ = merge_pool(std::move(pool_), std::move(batch), config_.max_shapelets);
      ++rounds_;
      ++added;
      if (everything) {
        enumerated_ = true;
        search_done_ = true;
      }
    }
    search_clock_.stop();

    if (control.unit_limit && added >= *control.unit_limit) { return BuildStatus::paused; }
    const auto forest_start = Clock::now();
    forest_ = RotationForest::fit(train_transform(), config_.forest, derive_seed(config_.seed, 0x5eed));
    forest_time_ = std::chrono::duration_cast<Duration>(Clock::now() - forest_start);
    return BuildStatus::complete;
  }

  std::vector<Shapelet> Stc::shapelets() const {
    std::vector<Shapelet> out;
    out.reserve(pool_.size());
    for (const auto& e: pool_) { out.push_back(e.shapelet); }
    return out;
  }

  FeatureMatrix Stc::train_transform() const {
    FeatureMatrix x(train_labels_.size(), pool_.size(), train_labels_, class_count_);
    for (std::size_t j = 0; j < pool_.size(); ++j) {
      for (std::size_t i = 0; i < train_labels_.size(); ++i) { x.at(i, j) = pool_[j].distances[i]; }
    }
    return x;
  }

  Probabilities Stc::predict_proba(std::span<const double> series) const {
    if (!is_built()) { throw std::logic_error("STC has not been built"); }
    require_length(series, series_length_);
    std::vector<double> row(pool_.size());
    for (std::size_t j = 0; j < pool_.size(); ++j) { row[j] = shapelet_distance(pool_[j].shapelet.values, series); }
    return forest_.predict_proba(row);
  }

  TrainEstimate Stc::estimate_train(const LabeledSeriesSet& train, const EstimateOptions& options) const {
    if (!is_built()) { throw std::logic_error("STC must be built before its train estimate"); }
    if (fingerprint(train) != train_fingerprint_) { throw std::invalid_argument("STC estimate requested on a different train set"); }
    const auto start = Clock::now();
    const auto x = train_transform();
    const auto cv = cross_validate(x.labels, x.class_count, options.folds, options.seed,
      [&](const std::vector<std::size_t>& fit_idx, const std::vector<std::size_t>& test_idx, std::size_t fold) {
        const auto forest = RotationForest::fit(x.select_rows(fit_idx), config_.forest, derive_seed(options.seed, fold + 1));
        std::vector<Probabilities> out;
        for (const auto i: test_idx) { out.push_back(forest.predict_proba(x.row(i))); }
        return out;
      });
    TrainEstimate est{cv.probabilities, cv.predictions, cv.accuracy, "cross-validation", {}};
    est.duration = std::chrono::duration_cast<Duration>(Clock::now() - start);
    return est;
  }

  std::unique_ptr<Classifier> Stc::fresh(std::uint64_t seed, std::optional<Duration> contract) const {
    StcConfig c = config_;
    c.seed = seed;
    if (contract) { c.search_time = *contract; }
    return std::make_unique<Stc>(c);
  }

  void Stc::set_contract(std::optional<Duration> contract) {
    config_.search_time = contract.value_or(StcConfig{}.search_time);
    search_clock_.set_limit(config_.search_time);
  }

  void Stc::save_state(std::ostream& out) const {
    cereal::PortableBinaryOutputArchive ar(out);
    ar(config_.max_shapelets, config_.search_time.count(), config_.min_shapelet_length, config_.seed, config_.forest,
       config_.budget_schedule);
    ar(pool_, timing_, forest_, train_labels_, rounds_, next_id_, search_done_, enumerated_, series_length_, class_count_,
       train_fingerprint_, search_clock_.accumulated().count(), forest_time_.count());
  }

  void Stc::load_state(std::istream& in) {
    detail::guarded_load([&] {
      cereal::PortableBinaryInputArchive ar(in);
      StcConfig c;
      std::int64_t search = 0;
      ar(c.max_shapelets, search, c.min_shapelet_length, c.seed, c.forest, c.budget_schedule);
      c.search_time = Duration(search);
      Stc restored(c);
      std::int64_t elapsed = 0;
      std::int64_t forest_time = 0;
      ar(restored.pool_, restored.timing_, restored.forest_, restored.train_labels_, restored.rounds_, restored.next_id_,
         restored.search_done_, restored.enumerated_, restored.series_length_, restored.class_count_,
         restored.train_fingerprint_, elapsed, forest_time);
      restored.search_clock_.set_elapsed(Duration(elapsed));
      restored.forest_time_ = Duration(forest_time);
      *this = std::move(restored);
    });
  }

} // namespace hivecote
