#include <hivecote/experiments.hpp>

#include <doctest.h>
#include <synthetic.hpp>
#include <temp_dir.hpp>

#include <hivecote/registry.hpp>

#include <fstream>
#include <sstream>

using namespace hivecote;

namespace {

  std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
  }

  /// Writes a small interval-mean problem as <root>/Toy/Toy_TRAIN.ts and _TEST.ts.
  void write_toy(const std::filesystem::path& root) {
    const auto p = synthetic::make_problem("Toy", synthetic::interval_mean, 50, 3, 30, 20);
    std::filesystem::create_directories(root / "Toy");
    write_ts_file(p.train, root / "Toy" / "Toy_TRAIN.ts");
    write_ts_file(p.test, root / "Toy" / "Toy_TEST.ts");
  }

} // namespace

TEST_CASE("registry") {
  CHECK(classifier_names() == std::vector<std::string>{"TSF", "RISE", "cBOSS", "STC", "HC"});
  for (const auto& n: classifier_names()) { CHECK(make_classifier(n)->name() == n); }
  try {
    (void)make_classifier("Bogus");
    FAIL("expected an error");
  } catch (const std::invalid_argument& e) {
    CHECK(std::string(e.what()) == "unknown classifier: Bogus");
  }
  CHECK(make_classifier("TSF", 0, std::chrono::seconds(9))->contract() == Duration(std::chrono::seconds(9)));
}

TEST_CASE("a run writes train and test files that parse") {
  TempDir dir("exp");
  write_toy(dir.path() / "data");
  RunSpec spec;
  spec.data_path = dir.path() / "data";
  spec.results_path = dir.path() / "results";
  spec.generate_train_files = true;
  spec.classifier_name = "TSF";
  spec.dataset_name = "Toy";
  spec.fold = 1;
  const auto outcome = run_experiment(spec);
  CHECK_FALSE(outcome.skipped);
  CHECK(outcome.test_file == dir.path() / "results" / "TSF" / "Predictions" / "Toy" / "testFold0.csv");
  REQUIRE(outcome.train_file.has_value());
  CHECK(*outcome.train_file == dir.path() / "results" / "TSF" / "Predictions" / "Toy" / "trainFold0.csv");

  const auto test = read_result(outcome.test_file);
  const auto train = read_result(*outcome.train_file);
  CHECK(test.split == "test");
  CHECK(train.split == "train");
  CHECK(test.rows.size() == 20);
  CHECK(train.rows.size() == 30);
  CHECK(test.accuracy == outcome.test_accuracy);
  CHECK(test.build_time_ns > 0);
  CHECK(test.parameters.rfind("TSF,", 0) == 0);

  // a second run changes nothing
  const auto before = slurp(outcome.test_file);
  const auto train_before = slurp(*outcome.train_file);
  const auto again = run_experiment(spec);
  CHECK(again.skipped);
  CHECK(slurp(outcome.test_file) == before);
  CHECK(slurp(*outcome.train_file) == train_before);
}

TEST_CASE("fold numbering") {
  TempDir dir("exp-fold");
  write_toy(dir.path() / "data");
  RunSpec spec;
  spec.data_path = dir.path() / "data";
  spec.results_path = dir.path() / "results";
  spec.classifier_name = "TSF";
  spec.dataset_name = "Toy";
  spec.fold = 3;
  const auto outcome = run_experiment(spec);
  CHECK(outcome.test_file.filename() == "testFold2.csv");
  CHECK_FALSE(outcome.train_file.has_value());
  spec.fold = 0;
  CHECK_THROWS_AS((void)run_experiment(spec), std::invalid_argument);
}

TEST_CASE("bad specs") {
  TempDir dir("exp-bad");
  RunSpec spec;
  spec.data_path = dir.path();
  spec.results_path = dir.path();
  spec.classifier_name = "Bogus";
  spec.dataset_name = "Toy";
  try {
    (void)run_experiment(spec);
    FAIL("expected an error");
  } catch (const std::invalid_argument& e) {
    CHECK(std::string(e.what()).find("unknown classifier") != std::string::npos);
  }
  spec.classifier_name = "TSF";
  CHECK_THROWS((void)run_experiment(spec)); // no data
}

TEST_CASE("make_result quantises rows") {
  const auto r = make_result("Toy", "X", "test", "p", std::vector<int>{0, 1}, {{0.1234567, 0.8765433}, {0.5, 0.5}},
                             Duration(5), Duration(7));
  CHECK(r.rows[0].probabilities == Probabilities{0.123457, 0.876543});
  CHECK(r.rows[1].predicted_label == 0);
  // truth 0, 1 against predictions 1, 0
  CHECK(r.accuracy == 0.0);
  CHECK(r.build_time_ns == 5);
  CHECK(r.test_time_ns == 7);
}
