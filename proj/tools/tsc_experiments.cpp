// Runs one classifier on one dataset resample and writes its results files:
//   tsc_experiments -dp=data -rp=results -gtf=true -cn=TSF -dn=Chinatown -f=1

#include <hivecote/experiments.hpp>
#include <hivecote/registry.hpp>

#include <CLI11.hpp>

#include "cli_args.hpp"

#include <algorithm>
#include <cstdio>
#include <iostream>

int main(int argc, char** argv) {
  using namespace hivecote;
  CLI::App app{"Build a time series classifier on a dataset fold and write train/test results files"};
  app.set_version_flag("--version", "1.0.0");

  RunSpec spec;
  std::string data_path;
  std::string results_path;
  std::string contract;
  app.add_option("--dp", data_path, "Directory holding <dataset>/<dataset>_TRAIN and _TEST files")->required()->envname("TSC_DP");
  app.add_option("--rp", results_path, "Root directory for results files")->required()->envname("TSC_RP");
  app.add_option("--gtf", spec.generate_train_files, "Also write the train-estimate file (true/false)")
    ->default_val(false)
    ->envname("TSC_GTF");
  app.add_option("--cn", spec.classifier_name, "Classifier: TSF, RISE, cBOSS, STC or HC")->required()->envname("TSC_CN");
  app.add_option("--dn", spec.dataset_name, "Dataset name")->required()->envname("TSC_DN");
  app.add_option("--f", spec.fold, "Resample number, 1 = the published split")->default_val(1)->envname("TSC_F");
  app.add_option("--contract", contract, "Train-time contract, e.g. 90s, 10m, 2h")->envname("TSC_CONTRACT");
  app.add_option("--seed", spec.seed, "Classifier seed")->default_val(0)->envname("TSC_SEED");
  app.add_option("--threads", spec.threads, "HC only: above 1 builds components concurrently")
    ->default_val(1)
    ->envname("TSC_THREADS");

  const auto args = cli::normalise_flags(argc, argv, {"dp", "rp", "gtf", "cn", "dn", "f", "contract", "seed", "threads"});
  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    spec.data_path = data_path;
    spec.results_path = results_path;
    if (!contract.empty()) { spec.contract = parse_duration(contract); }
    const auto outcome = run_experiment(spec);
    if (outcome.skipped) {
      std::cout << "skipped: results already exist at " << outcome.test_file.string() << "\n";
    } else {
      std::cout << "wrote " << outcome.test_file.string() << "\n";
      if (outcome.train_file) { std::cout << "wrote " << outcome.train_file->string() << "\n"; }
    }
    std::printf("%s %s fold %d test accuracy %.6f\n", spec.classifier_name.c_str(), spec.dataset_name.c_str(), spec.fold,
                outcome.test_accuracy);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
