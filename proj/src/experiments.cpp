#include <hivecote/experiments.hpp>
#include <hivecote/random.hpp>
#include <hivecote/registry.hpp>

#include <algorithm>
#include <stdexcept>

namespace hivecote {

  ClassifierResult make_result(const std::string& dataset, const std::string& classifier, const std::string& split,
                               const std::string& parameters, std::span<const int> truth,
                               const std::vector<Probabilities>& probabilities, Duration build_time, Duration test_time) {
    ClassifierResult r;
    r.dataset = dataset;
    r.classifier = classifier;
    r.split = split;
    r.parameters = parameters;
    r.rows = make_rows(truth, probabilities);
    r.accuracy = row_accuracy(r.rows);
    r.build_time_ns = build_time.count();
    r.test_time_ns = test_time.count();
    return r;
  }

  RunOutcome run_experiment(const RunSpec& spec) {
    if (spec.fold < 1) { throw std::invalid_argument("fold must be >= 1"); }
    const auto& names = classifier_names();
    if (std::find(names.begin(), names.end(), spec.classifier_name) == names.end()) {
      throw std::invalid_argument("unknown classifier: " + spec.classifier_name);
    }
    if (spec.dataset_name.empty()) { throw std::invalid_argument("no dataset named"); }

    RunOutcome outcome;
    const int file_fold = spec.fold - 1;
    outcome.test_file = results_file_path(spec.results_path, spec.classifier_name, spec.dataset_name, "test", file_fold);
    if (spec.generate_train_files) {
      outcome.train_file = results_file_path(spec.results_path, spec.classifier_name, spec.dataset_name, "train", file_fold);
    }
    if (std::filesystem::exists(outcome.test_file) && (!outcome.train_file || std::filesystem::exists(*outcome.train_file))) {
      outcome.skipped = true;
      outcome.test_accuracy = read_result(outcome.test_file).accuracy;
      return outcome;
    }

    const auto [raw_train, raw_test] = load_train_test(spec.data_path / spec.dataset_name, spec.dataset_name);
    const auto [train, test] = resample(raw_train, raw_test, spec.fold);

    auto classifier = make_classifier(spec.classifier_name, spec.seed, spec.contract);
    if (auto* hc = dynamic_cast<HiveCote*>(classifier.get()); hc && spec.threads > 1) {
      HiveCoteConfig config = hc->config();
      config.threaded = true;
      classifier = std::make_unique<HiveCote>(config);
    }
    const auto build_start = Clock::now();
    classifier->build(train);
    const auto build_time = std::chrono::duration_cast<Duration>(Clock::now() - build_start);

    const auto test_start = Clock::now();
    const auto probabilities = classifier->predict_proba(test);
    const auto test_time = std::chrono::duration_cast<Duration>(Clock::now() - test_start);

    const auto test_result = make_result(spec.dataset_name, spec.classifier_name, "test", classifier->parameters(),
                                         test.labels(), probabilities, build_time, test_time);
    write_result(test_result, outcome.test_file);
    outcome.test_accuracy = test_result.accuracy;

    if (outcome.train_file) {
      EstimateOptions options;
      options.seed = derive_seed(spec.seed, 0xe5);
      const auto estimate = classifier->estimate_train(train, options);
      const auto train_result = make_result(spec.dataset_name, spec.classifier_name, "train", classifier->parameters(),
                                            train.labels(), estimate.probabilities, build_time, estimate.duration);
      write_result(train_result, *outcome.train_file);
    }
    return outcome;
  }

  void write_component_results(const HiveCote& ensemble, const LabeledSeriesSet& test, const std::filesystem::path& root,
                               const std::string& dataset, int file_fold) {
    if (!ensemble.is_built()) { throw std::logic_error("ensemble has not been built"); }
    for (const auto& c: ensemble.components()) {
      const auto params = c.classifier->parameters();
      const auto train_result = make_result(dataset, c.name, "train", params, ensemble.train_labels(), c.estimate.probabilities,
                                            c.build_duration, c.estimate.duration);
      write_result(train_result, results_file_path(root, c.name, dataset, "train", file_fold));

      const auto start = Clock::now();
      const auto probabilities = c.classifier->predict_proba(test);
      const auto test_time = std::chrono::duration_cast<Duration>(Clock::now() - start);
      const auto test_result = make_result(dataset, c.name, "test", params, test.labels(), probabilities, c.build_duration,
                                           test_time);
      write_result(test_result, results_file_path(root, c.name, dataset, "test", file_fold));
    }
  }

} // namespace hivecote
