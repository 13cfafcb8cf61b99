#include <hivecote/hive_cote.hpp>
#include <hivecote/random.hpp>
#include <hivecote/registry.hpp>

#include "serialization.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace hivecote {

  Combination combine_probabilities(std::span<const Probabilities> component_probs, std::span<const double> weights,
                                    double alpha) {
    if (component_probs.empty()) { throw std::invalid_argument("no component probabilities to combine"); }
    if (component_probs.size() != weights.size()) { throw std::invalid_argument("one weight per component is required"); }
    if (!(alpha >= 0.0)) { throw std::invalid_argument("alpha must be non-negative"); }
    const std::size_t c = component_probs.front().size();
    if (c == 0) { throw std::invalid_argument("probability vectors are empty"); }
    bool any_positive = false;
    for (const double w: weights) {
      if (!(w >= 0.0) || !std::isfinite(w)) { throw std::invalid_argument("weights must be finite and non-negative"); }
      any_positive = any_positive || w > 0.0;
    }
    if (!any_positive) { throw std::invalid_argument("all component weights are zero"); }

    Probabilities scores(c, 0.0);
    for (std::size_t i = 0; i < component_probs.size(); ++i) {
      const auto& q = component_probs[i];
      if (q.size() != c) { throw std::invalid_argument("component probability vectors differ in length"); }
      double sum = 0.0;
      for (const double v: q) { sum += v; }
      if (std::abs(sum - 1.0) > 1e-6) { throw std::invalid_argument("component probabilities do not sum to 1"); }
      const double w = std::pow(weights[i], alpha);
      for (std::size_t j = 0; j < c; ++j) { scores[j] += w * q[j]; }
    }
    double total = 0.0;
    for (const double s: scores) { total += s; }
    Combination out;
    out.prediction = argmax(scores);
    if (total > 0.0) {
      for (auto& s: scores) { s /= total; }
    } else {
      scores.assign(c, 1.0 / static_cast<double>(c));
    }
    out.probabilities = std::move(scores);
    return out;
  }

  std::vector<double> usable_weights(std::vector<double> weights) {
    if (std::all_of(weights.begin(), weights.end(), [](double w) { return w == 0.0; })) { weights.assign(weights.size(), 1.0); }
    return weights;
  }

  namespace {

    std::vector<std::unique_ptr<Classifier>> default_components(const HiveCoteConfig& config) {
      std::vector<std::unique_ptr<Classifier>> out;
      for (std::size_t i = 0; i < config.components.size(); ++i) {
        out.push_back(make_classifier(config.components[i], derive_seed(config.seed, i + 1)));
      }
      return out;
    }

    template<class Archive>
    void archive_estimate(Archive& ar, TrainEstimate& e) {
      std::int64_t duration = e.duration.count();
      ar(e.probabilities, e.predictions, e.accuracy, e.method, duration);
      e.duration = Duration(duration);
    }

  } // namespace

  HiveCote::HiveCote(HiveCoteConfig config) : HiveCote(config, default_components(config)) {}

  HiveCote::HiveCote(HiveCoteConfig config, std::vector<std::unique_ptr<Classifier>> components)
    : config_(std::move(config)) {
    if (components.empty()) { throw std::invalid_argument("HIVE-COTE needs at least one component"); }
    if (!(config_.alpha >= 0.0)) { throw std::invalid_argument("alpha must be non-negative"); }
    if (config_.cv_folds < 2) { throw std::invalid_argument("cross-validation needs at least two folds"); }
    if (config_.contract && *config_.contract <= Duration::zero()) { throw std::invalid_argument("contract must be positive"); }
    config_.components.clear();
    for (auto& c: components) {
      if (!c) { throw std::invalid_argument("null component"); }
      if (c->name() == "HC") { throw std::invalid_argument("HIVE-COTE cannot contain itself"); }
      config_.components.push_back(c->name());
      TrainedComponent t;
      t.name = c->name();
      t.classifier = std::move(c);
      components_.push_back(std::move(t));
    }
  }

  std::string HiveCote::parameters() const {
    std::ostringstream s;
    s << "HC,alpha," << config_.alpha << ",cvFolds," << config_.cv_folds << ",seed," << config_.seed << ",threaded,"
      << (config_.threaded ? "true" : "false") << ",contractNanos," << detail::encode_duration(config_.contract);
    for (const auto& c: components_) {
      s << "," << c.name << ",weight," << c.estimate.accuracy << ",method," << (c.estimated ? c.estimate.method : "none");
    }
    return s.str();
  }

  std::size_t HiveCote::units_built() const {
    std::size_t total = 0;
    for (const auto& c: components_) { total += c.classifier->units_built(); }
    return total;
  }

  std::optional<Duration> HiveCote::component_slice() const {
    if (!config_.contract) { return std::nullopt; }
    if (config_.threaded) { return config_.contract; }
    return *config_.contract / static_cast<long>(components_.size());
  }

  void HiveCote::allocate_contracts() {
    const auto slice = component_slice();
    for (auto& c: components_) {
      c.slice = slice;
      if (slice) { c.classifier->set_contract(c.classifier->estimates_internally() ? *slice : *slice / 2); }
    }
    allocated_ = true;
  }

  void HiveCote::build_component(TrainedComponent& component, std::size_t, const LabeledSeriesSet& train) {
    if (!component.classifier->is_built()) {
      component.classifier->build(train);
      if (component.classifier->units_built() == 0) {
        throw std::runtime_error("component " + component.name + " produced no base units");
      }
    }
    component.build_duration = component.classifier->build_time();
  }

  void HiveCote::estimate_component(TrainedComponent& component, std::size_t index, const LabeledSeriesSet& train) {
    if (component.estimated) { return; }
    EstimateOptions options;
    options.folds = config_.cv_folds;
    options.seed = derive_seed(config_.seed, 0x1000 + index);
    if (component.slice && !component.classifier->estimates_internally()) { options.budget = *component.slice / 2; }
    component.estimate = component.classifier->estimate_train(train, options);
    quantize_estimate(component.estimate, train.labels());
    component.estimated = true;
  }

  BuildStatus HiveCote::build(const LabeledSeriesSet& train, const BuildControl& control) {
    if (series_length_ == 0) {
      train.require_all_classes();
      series_length_ = train.series_length();
      class_count_ = train.class_count();
      train_fingerprint_ = fingerprint(train);
      train_labels_ = train.labels();
    } else if (fingerprint(train) != train_fingerprint_) {
      throw std::invalid_argument("HIVE-COTE resumed on a different train set");
    }
    if (!allocated_) { allocate_contracts(); }
    const auto session_start = Clock::now();
    const auto charge = [&] { build_time_ += std::chrono::duration_cast<Duration>(Clock::now() - session_start); };

    if (config_.threaded) {
      std::vector<std::exception_ptr> errors(components_.size());
      std::vector<std::thread> workers;
      for (std::size_t i = next_component_; i < components_.size(); ++i) {
        workers.emplace_back([&, i] {
          try {
            build_component(components_[i], i, train);
            estimate_component(components_[i], i, train);
          } catch (...) {
            errors[i] = std::current_exception();
          }
        });
      }
      for (auto& w: workers) { w.join(); }
      charge();
      for (const auto& e: errors) {
        if (e) { std::rethrow_exception(e); }
      }
      next_component_ = components_.size();
      return BuildStatus::complete;
    }

    std::size_t added = 0;
    while (next_component_ < components_.size()) {
      auto& c = components_[next_component_];
      if (!c.classifier->is_built()) {
        BuildControl sub;
        if (control.unit_limit) {
          if (added >= *control.unit_limit) {
            charge();
            return BuildStatus::paused;
          }
          sub.unit_limit = *control.unit_limit - added;
        }
        const auto before = c.classifier->units_built();
        const auto status = c.classifier->build(train, sub);
        added += c.classifier->units_built() - before;
        if (status == BuildStatus::paused) {
          charge();
          return BuildStatus::paused;
        }
      }
      build_component(c, next_component_, train);
      estimate_component(c, next_component_, train);
      ++next_component_;
    }
    charge();
    return BuildStatus::complete;
  }

  std::vector<double> HiveCote::weights() const {
    std::vector<double> w;
    for (const auto& c: components_) { w.push_back(c.estimate.accuracy); }
    return w;
  }

  Combination HiveCote::classify(std::span<const double> series) const {
    if (!is_built()) { throw std::logic_error("HIVE-COTE has not been built"); }
    require_length(series, series_length_);
    std::vector<Probabilities> probs;
    probs.reserve(components_.size());
    for (const auto& c: components_) { probs.push_back(quantize_probabilities(c.classifier->predict_proba(series))); }
    return combine_probabilities(probs, usable_weights(weights()), config_.alpha);
  }

  Probabilities HiveCote::predict_proba(std::span<const double> series) const { return classify(series).probabilities; }

  TrainEstimate HiveCote::estimate_train(const LabeledSeriesSet& train, const EstimateOptions&) const {
    if (!is_built()) { throw std::logic_error("HIVE-COTE must be built before its train estimate"); }
    if (fingerprint(train) != train_fingerprint_) { throw std::invalid_argument("HIVE-COTE estimate requested on a different train set"); }
    const auto start = Clock::now();
    const auto w = usable_weights(weights());
    TrainEstimate est;
    std::size_t correct = 0;
    for (std::size_t i = 0; i < train_labels_.size(); ++i) {
      std::vector<Probabilities> probs;
      for (const auto& c: components_) { probs.push_back(c.estimate.probabilities[i]); }
      auto combined = combine_probabilities(probs, w, config_.alpha);
      correct += combined.prediction == train_labels_[i] ? 1 : 0;
      est.predictions.push_back(combined.prediction);
      est.probabilities.push_back(std::move(combined.probabilities));
    }
    est.accuracy = static_cast<double>(correct) / static_cast<double>(train_labels_.size());
    est.method = "internal";
    est.duration = std::chrono::duration_cast<Duration>(Clock::now() - start);
    return est;
  }

  std::unique_ptr<Classifier> HiveCote::fresh(std::uint64_t seed, std::optional<Duration> contract) const {
    HiveCoteConfig c = config_;
    c.seed = seed;
    c.contract = contract;
    std::vector<std::unique_ptr<Classifier>> parts;
    for (std::size_t i = 0; i < components_.size(); ++i) {
      parts.push_back(components_[i].classifier->fresh(derive_seed(seed, i + 1), std::nullopt));
    }
    return std::make_unique<HiveCote>(c, std::move(parts));
  }

  void HiveCote::set_contract(std::optional<Duration> contract) {
    if (contract && *contract <= Duration::zero()) { throw std::invalid_argument("contract must be positive"); }
    config_.contract = contract;
    if (allocated_) { allocate_contracts(); }
  }

  std::string HiveCote::header_state() const {
    std::ostringstream out;
    {
      cereal::PortableBinaryOutputArchive ar(out);
      ar(config_.components, config_.alpha, detail::encode_duration(config_.contract), config_.threaded, config_.cv_folds,
         config_.seed);
      ar(static_cast<std::uint64_t>(next_component_), allocated_, series_length_, class_count_, train_fingerprint_,
         train_labels_, build_time_.count());
      for (const auto& c: components_) {
        TrainEstimate e = c.estimate;
        archive_estimate(ar, e);
        ar(c.estimated, c.build_duration.count(), detail::encode_duration(c.slice));
      }
    }
    return out.str();
  }

  void HiveCote::restore_header(const std::string& payload, std::vector<std::string>& names) {
    std::istringstream in(payload);
    cereal::PortableBinaryInputArchive ar(in);
    HiveCoteConfig c;
    std::int64_t contract = -1;
    ar(c.components, c.alpha, contract, c.threaded, c.cv_folds, c.seed);
    c.contract = detail::decode_duration(contract);
    std::uint64_t next = 0;
    std::int64_t build_time = 0;
    ar(next, allocated_, series_length_, class_count_, train_fingerprint_, train_labels_, build_time);
    if (next > c.components.size()) { throw checkpoint_error("HIVE-COTE progress marker out of range"); }
    next_component_ = static_cast<std::size_t>(next);
    build_time_ = Duration(build_time);
    components_.clear();
    for (const auto& name: c.components) {
      TrainedComponent t;
      t.name = name;
      archive_estimate(ar, t.estimate);
      std::int64_t duration = 0;
      std::int64_t slice = -1;
      ar(t.estimated, duration, slice);
      t.build_duration = Duration(duration);
      t.slice = detail::decode_duration(slice);
      components_.push_back(std::move(t));
    }
    names = c.components;
    config_ = std::move(c);
  }

  std::vector<CheckpointSection> HiveCote::checkpoint_sections() const {
    std::vector<CheckpointSection> sections{{"HC", header_state()}};
    for (std::size_t i = 0; i < components_.size(); ++i) {
      std::ostringstream payload;
      components_[i].classifier->save_state(payload);
      sections.push_back({"HC/" + std::to_string(i) + "/" + components_[i].name, payload.str()});
    }
    return sections;
  }

  void HiveCote::restore_sections(const std::vector<CheckpointSection>& sections) {
    if (sections.empty() || sections.front().name != "HC") { throw checkpoint_error("missing HIVE-COTE header section"); }
    HiveCote restored;
    std::vector<std::string> names;
    detail::guarded_load([&] { restored.restore_header(sections.front().payload, names); });
    if (sections.size() != names.size() + 1) { throw checkpoint_error("HIVE-COTE checkpoint has the wrong number of component sections"); }
    for (std::size_t i = 0; i < names.size(); ++i) {
      const auto& s = sections[i + 1];
      if (s.name != "HC/" + std::to_string(i) + "/" + names[i]) { throw checkpoint_error("unexpected section '" + s.name + "'"); }
      auto component = make_classifier(names[i]);
      std::istringstream payload(s.payload);
      component->load_state(payload);
      restored.components_[i].classifier = std::move(component);
    }
    *this = std::move(restored);
  }

  void HiveCote::save_state(std::ostream& out) const {
    cereal::PortableBinaryOutputArchive ar(out);
    std::vector<std::pair<std::string, std::string>> sections;
    for (const auto& s: checkpoint_sections()) { sections.emplace_back(s.name, s.payload); }
    ar(sections);
  }

  void HiveCote::load_state(std::istream& in) {
    std::vector<std::pair<std::string, std::string>> raw;
    detail::guarded_load([&] {
      cereal::PortableBinaryInputArchive ar(in);
      ar(raw);
    });
    std::vector<CheckpointSection> sections;
    for (auto& [name, payload]: raw) { sections.push_back({std::move(name), std::move(payload)}); }
    restore_sections(sections);
  }

  std::filesystem::path results_file_path(const std::filesystem::path& root, const std::string& classifier,
                                          const std::string& dataset, const std::string& split, int file_fold) {
    return root / classifier / "Predictions" / dataset / (split + "Fold" + std::to_string(file_fold) + ".csv");
  }

  namespace {

    ClassifierResult read_required(const std::filesystem::path& path) {
      if (!std::filesystem::exists(path)) { throw std::runtime_error("missing results file: " + path.string()); }
      return read_result(path);
    }

    void require_matching_rows(const std::vector<ClassifierResult>& results, const std::vector<std::string>& names) {
      for (std::size_t k = 1; k < results.size(); ++k) {
        if (results[k].rows.size() != results[0].rows.size()) {
          throw std::runtime_error("row count mismatch: " + names[k] + " has " + std::to_string(results[k].rows.size())
                                   + " rows, " + names[0] + " has " + std::to_string(results[0].rows.size()));
        }
        for (std::size_t i = 0; i < results[k].rows.size(); ++i) {
          if (results[k].rows[i].true_label != results[0].rows[i].true_label
              || results[k].rows[i].probabilities.size() != results[0].rows[i].probabilities.size()) {
            throw std::runtime_error("results of " + names[k] + " and " + names[0] + " disagree on case " + std::to_string(i));
          }
        }
      }
    }

    std::vector<ClassifierResult> read_split(const std::filesystem::path& root, const std::string& dataset, int fold,
                                             const std::vector<std::string>& names, const std::string& split) {
      if (names.empty()) { throw std::invalid_argument("no components named"); }
      std::vector<ClassifierResult> out;
      for (const auto& name: names) { out.push_back(read_required(results_file_path(root, name, dataset, split, fold))); }
      require_matching_rows(out, names);
      return out;
    }

    ResultsEnsemble combine_results(const std::vector<ClassifierResult>& rows_from, const std::vector<double>& weights,
                                    const std::vector<std::string>& names, double alpha) {
      ResultsEnsemble e;
      e.components = names;
      e.weights = weights;
      e.alpha = alpha;
      const auto effective = usable_weights(weights);
      std::size_t correct = 0;
      for (std::size_t i = 0; i < rows_from.front().rows.size(); ++i) {
        std::vector<Probabilities> probs;
        for (const auto& r: rows_from) { probs.push_back(r.rows[i].probabilities); }
        auto combined = combine_probabilities(probs, effective, alpha);
        const int truth = rows_from.front().rows[i].true_label;
        correct += combined.prediction == truth ? 1 : 0;
        e.truth.push_back(truth);
        e.predictions.push_back(combined.prediction);
        e.probabilities.push_back(std::move(combined.probabilities));
      }
      e.accuracy = static_cast<double>(correct) / static_cast<double>(e.truth.size());
      return e;
    }

  } // namespace

  ResultsEnsemble build_from_results_files(const std::filesystem::path& root, const std::string& dataset, int fold,
                                           const std::vector<std::string>& component_names, double alpha) {
    const auto train = read_split(root, dataset, fold, component_names, "train");
    const auto test = read_split(root, dataset, fold, component_names, "test");
    std::vector<double> weights;
    for (const auto& r: train) { weights.push_back(r.accuracy); }
    return combine_results(test, weights, component_names, alpha);
  }

  double tune_alpha(const std::filesystem::path& root, const std::string& dataset, int fold,
                    const std::vector<std::string>& component_names, const std::vector<double>& grid) {
    if (grid.empty()) { throw std::invalid_argument("alpha grid is empty"); }
    const auto train = read_split(root, dataset, fold, component_names, "train");
    std::vector<double> weights;
    for (const auto& r: train) { weights.push_back(r.accuracy); }
    std::vector<double> sorted = grid;
    std::sort(sorted.begin(), sorted.end());
    double best_alpha = sorted.front();
    double best_accuracy = -1.0;
    for (const double alpha: sorted) {
      const double acc = combine_results(train, weights, component_names, alpha).accuracy;
      if (acc > best_accuracy) {
        best_accuracy = acc;
        best_alpha = alpha;
      }
    }
    return best_alpha;
  }

} // namespace hivecote
