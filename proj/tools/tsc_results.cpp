// Works on results files: combine components from files, tune the CAWPE exponent, score a file.

#include <hivecote/hive_cote.hpp>
#include <hivecote/results.hpp>

#include <CLI11.hpp>

#include "cli_args.hpp"

#include <cstdio>
#include <iostream>
#include <sstream>

namespace {

  std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
      if (!item.empty()) { out.push_back(item); }
    }
    return out;
  }

} // namespace

int main(int argc, char** argv) {
  using namespace hivecote;
  CLI::App app{"HIVE-COTE results-file utilities"};
  app.require_subcommand(1);

  std::string results_path;
  std::string dataset;
  int fold = 1;
  std::string components = "TSF,RISE,cBOSS,STC";
  const auto add_common = [&](CLI::App* sub) {
    sub->add_option("--rp", results_path, "Results root")->required()->envname("TSC_RP");
    sub->add_option("--dn", dataset, "Dataset name")->required()->envname("TSC_DN");
    sub->add_option("--f", fold, "Resample number (1-based, as given to tsc_experiments)")->default_val(1)->envname("TSC_F");
    sub->add_option("--components", components, "Comma-separated component names")->default_val(components);
  };

  auto* combine = app.add_subcommand("combine", "Build HIVE-COTE from the components' results files");
  add_common(combine);
  double alpha = 4.0;
  std::string output;
  combine->add_option("--alpha", alpha, "CAWPE exponent")->default_val(4.0);
  combine->add_option("--output", output, "Write the combined test predictions to this results file");

  auto* tune = app.add_subcommand("tune-alpha", "Pick the exponent with the best combined train accuracy");
  add_common(tune);
  std::string grid = "1,2,3,4,5,6,7,8,9,10";
  tune->add_option("--grid", grid, "Comma-separated candidate exponents")->default_val(grid);

  auto* score_cmd = app.add_subcommand("score", "Summarise one results file");
  std::string file;
  score_cmd->add_option("file", file, "Results file")->required();

  const auto args = cli::normalise_flags(argc, argv, {"rp", "dn", "f"});
  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (*combine) {
      const auto names = split_list(components);
      const auto e = build_from_results_files(results_path, dataset, fold - 1, names, alpha);
      std::printf("components:");
      for (std::size_t i = 0; i < names.size(); ++i) { std::printf(" %s(%.6f)", names[i].c_str(), e.weights[i]); }
      std::printf("\nalpha %g test accuracy %.6f over %zu cases\n", alpha, e.accuracy, e.truth.size());
      if (!output.empty()) {
        ClassifierResult r;
        r.dataset = dataset;
        r.classifier = "HC";
        r.split = "test";
        std::ostringstream params;
        params << "HC-from-files,alpha," << alpha << ",components," << components;
        r.parameters = params.str();
        r.rows = make_rows(e.truth, e.probabilities);
        r.accuracy = row_accuracy(r.rows);
        write_result(r, output);
        std::printf("wrote %s\n", output.c_str());
      }
    } else if (*tune) {
      std::vector<double> values;
      for (const auto& s: split_list(grid)) { values.push_back(std::stod(s)); }
      const double best = tune_alpha(results_path, dataset, fold - 1, split_list(components), values);
      std::printf("best alpha %g\n", best);
    } else if (*score_cmd) {
      const auto r = read_result(file);
      const auto s = score(r);
      std::printf("%s %s %s: accuracy %.6f over %zu cases\n", r.dataset.c_str(), r.classifier.c_str(), r.split.c_str(), s.accuracy,
                  r.rows.size());
      for (const auto& [label, recall]: s.recall) { std::printf("  class %d recall %.6f\n", label, recall); }
      std::printf("build %.6f h (%.4f min), test %.6f h (%.4f min)\n", s.build_hours, s.build_minutes, s.test_hours, s.test_minutes);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
