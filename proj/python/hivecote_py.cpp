// Python bindings: data loading, the five classifiers, the combiner and results files.

#include <hivecote/checkpoint.hpp>
#include <hivecote/hive_cote.hpp>
#include <hivecote/registry.hpp>
#include <hivecote/results.hpp>

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

namespace py = pybind11;
using namespace hivecote;

namespace {

  using Matrix = py::array_t<double, py::array::c_style | py::array::forcecast>;
  using Labels = py::array_t<int, py::array::c_style | py::array::forcecast>;

  LabeledSeriesSet to_set(const Matrix& x, const Labels& y, std::vector<std::string> class_names) {
    if (x.ndim() != 2) { throw py::value_error("X must be a 2-d array (cases x length)"); }
    if (y.ndim() != 1 || y.shape(0) != x.shape(0)) { throw py::value_error("y must be 1-d with one label per row of X"); }
    const auto n = static_cast<std::size_t>(x.shape(0));
    const auto m = static_cast<std::size_t>(x.shape(1));
    std::vector<double> values(x.data(), x.data() + n * m);
    std::vector<int> labels(y.data(), y.data() + n);
    if (class_names.empty()) {
      int top = 0;
      for (const int v: labels) { top = std::max(top, v); }
      for (int c = 0; c <= top; ++c) { class_names.push_back(std::to_string(c)); }
    }
    return {std::move(values), m, std::move(labels), std::move(class_names)};
  }

  py::tuple from_set(const LabeledSeriesSet& d) {
    Matrix x({d.size(), d.series_length()});
    std::copy(d.values().begin(), d.values().end(), x.mutable_data());
    Labels y(static_cast<py::ssize_t>(d.size()));
    std::copy(d.labels().begin(), d.labels().end(), y.mutable_data());
    return py::make_tuple(x, y, d.class_names());
  }

  Matrix to_matrix(const std::vector<Probabilities>& rows) {
    const std::size_t c = rows.empty() ? 0 : rows.front().size();
    Matrix out({rows.size(), c});
    for (std::size_t i = 0; i < rows.size(); ++i) { std::copy(rows[i].begin(), rows[i].end(), out.mutable_data() + i * c); }
    return out;
  }

  std::optional<Duration> seconds(std::optional<double> s) {
    if (!s) { return std::nullopt; }
    return from_seconds(*s);
  }

  /// Owns a classifier and remembers the training length so predict can check shapes.
  class PyClassifier {
  public:
    PyClassifier(const std::string& name, std::uint64_t seed, std::optional<double> contract_seconds)
      : model_(make_classifier(name, seed, seconds(contract_seconds))) {}
    explicit PyClassifier(std::unique_ptr<Classifier> model) : model_(std::move(model)) {}

    PyClassifier& fit(const Matrix& x, const Labels& y, std::vector<std::string> class_names) {
      train_ = to_set(x, y, std::move(class_names));
      py::gil_scoped_release release;
      model_->build(train_);
      return *this;
    }

    [[nodiscard]] Matrix predict_proba(const Matrix& x) const {
      if (x.ndim() != 2) { throw py::value_error("X must be a 2-d array"); }
      const auto n = static_cast<std::size_t>(x.shape(0));
      const auto m = static_cast<std::size_t>(x.shape(1));
      std::vector<Probabilities> rows(n);
      {
        py::gil_scoped_release release;
        for (std::size_t i = 0; i < n; ++i) { rows[i] = model_->predict_proba(std::span<const double>(x.data() + i * m, m)); }
      }
      return to_matrix(rows);
    }

    [[nodiscard]] Labels predict(const Matrix& x) const {
      const auto p = predict_proba(x);
      const auto n = static_cast<std::size_t>(p.shape(0));
      const auto c = static_cast<std::size_t>(p.shape(1));
      Labels out(static_cast<py::ssize_t>(n));
      for (std::size_t i = 0; i < n; ++i) { out.mutable_data()[i] = argmax(std::span<const double>(p.data() + i * c, c)); }
      return out;
    }

    [[nodiscard]] py::dict train_estimate(std::size_t folds, std::uint64_t seed) const {
      if (!model_->is_built()) { throw py::value_error("fit the classifier first"); }
      EstimateOptions options;
      options.folds = folds;
      options.seed = seed;
      TrainEstimate e;
      {
        py::gil_scoped_release release;
        e = model_->estimate_train(train_, options);
      }
      py::dict d;
      d["accuracy"] = e.accuracy;
      d["method"] = e.method;
      d["probabilities"] = to_matrix(e.probabilities);
      d["predictions"] = e.predictions;
      return d;
    }

    [[nodiscard]] const Classifier& model() const { return *model_; }

  private:
    std::unique_ptr<Classifier> model_;
    LabeledSeriesSet train_{};
  };

  py::dict result_to_dict(const ClassifierResult& r) {
    py::dict d;
    d["dataset"] = r.dataset;
    d["classifier"] = r.classifier;
    d["split"] = r.split;
    d["parameters"] = r.parameters;
    d["accuracy"] = r.accuracy;
    d["build_time_ns"] = r.build_time_ns;
    d["test_time_ns"] = r.test_time_ns;
    std::vector<int> truth;
    std::vector<int> predicted;
    std::vector<Probabilities> probs;
    for (const auto& row: r.rows) {
      truth.push_back(row.true_label);
      predicted.push_back(row.predicted_label);
      probs.push_back(row.probabilities);
    }
    d["true_labels"] = truth;
    d["predicted_labels"] = predicted;
    d["probabilities"] = to_matrix(probs);
    return d;
  }

} // namespace

PYBIND11_MODULE(hivecote, m) {
  m.doc() = "HIVE-COTE 1.0 time series classification";

  m.def("classifier_names", &classifier_names, "Names accepted by Classifier()");

  m.def("load_ts", [](const std::filesystem::path& path) { return from_set(load_ts_file(path)); }, py::arg("path"),
        "Load a .ts file as (X, y, class_names)");
  m.def("load_csv", [](const std::filesystem::path& path) { return from_set(load_csv_file(path)); }, py::arg("path"),
        "Load a headerless CSV (label last) as (X, y, class_names)");
  m.def("write_ts",
        [](const std::filesystem::path& path, const Matrix& x, const Labels& y, std::vector<std::string> class_names) {
          write_ts_file(to_set(x, y, std::move(class_names)), path);
        },
        py::arg("path"), py::arg("X"), py::arg("y"), py::arg("class_names") = std::vector<std::string>{});

  py::class_<PyClassifier>(m, "Classifier")
    .def(py::init<const std::string&, std::uint64_t, std::optional<double>>(), py::arg("name"), py::arg("seed") = 0,
         py::arg("contract_seconds") = py::none())
    .def("fit", &PyClassifier::fit, py::arg("X"), py::arg("y"), py::arg("class_names") = std::vector<std::string>{},
         py::return_value_policy::reference_internal)
    .def("predict_proba", &PyClassifier::predict_proba, py::arg("X"))
    .def("predict", &PyClassifier::predict, py::arg("X"))
    .def("train_estimate", &PyClassifier::train_estimate, py::arg("folds") = 10, py::arg("seed") = 0,
         "Out-of-sample train predictions (cross-validated or internal)")
    .def("save", [](const PyClassifier& c, const std::filesystem::path& path) { save_checkpoint(c.model(), path); }, py::arg("path"))
    .def_static("load", [](const std::filesystem::path& path) { return PyClassifier(load_checkpoint(path)); }, py::arg("path"))
    .def_property_readonly("name", [](const PyClassifier& c) { return c.model().name(); })
    .def_property_readonly("parameters", [](const PyClassifier& c) { return c.model().parameters(); })
    .def_property_readonly("is_built", [](const PyClassifier& c) { return c.model().is_built(); })
    .def_property_readonly("units_built", [](const PyClassifier& c) { return c.model().units_built(); })
    .def_property_readonly("build_seconds", [](const PyClassifier& c) { return to_seconds(c.model().build_time()); })
    .def_property_readonly("weights", [](const PyClassifier& c) {
      const auto* hc = dynamic_cast<const HiveCote*>(&c.model());
      if (hc == nullptr) { throw py::attribute_error("only the HC ensemble has component weights"); }
      py::dict d;
      for (std::size_t i = 0; i < hc->components().size(); ++i) { d[py::str(hc->components()[i].name)] = hc->weights()[i]; }
      return d;
    });

  m.def("combine_probabilities",
        [](const std::vector<Probabilities>& probs, const std::vector<double>& weights, double alpha) {
          const auto c = combine_probabilities(probs, weights, alpha);
          return py::make_tuple(c.probabilities, c.prediction);
        },
        py::arg("probabilities"), py::arg("weights"), py::arg("alpha") = 4.0,
        "CAWPE combination of one probability vector per component; returns (vector, class)");

  m.def("read_result", [](const std::filesystem::path& path) { return result_to_dict(read_result(path)); }, py::arg("path"));
  m.def("score",
        [](const std::filesystem::path& path) {
          const auto s = score(read_result(path));
          py::dict d;
          d["accuracy"] = s.accuracy;
          d["recall"] = s.recall;
          d["build_hours"] = s.build_hours;
          d["test_hours"] = s.test_hours;
          return d;
        },
        py::arg("path"));

  m.def("build_from_results_files",
        [](const std::filesystem::path& root, const std::string& dataset, int fold, const std::vector<std::string>& components,
           double alpha) {
          const auto e = build_from_results_files(root, dataset, fold, components, alpha);
          py::dict d;
          d["weights"] = e.weights;
          d["accuracy"] = e.accuracy;
          d["predictions"] = e.predictions;
          d["probabilities"] = to_matrix(e.probabilities);
          return d;
        },
        py::arg("results_root"), py::arg("dataset"), py::arg("fold") = 0,
        py::arg("components") = std::vector<std::string>{"TSF", "RISE", "cBOSS", "STC"}, py::arg("alpha") = 4.0,
        "Combine components from their trainFold/testFold files (fold is the 0-based file index)");

  m.def("tune_alpha", &tune_alpha, py::arg("results_root"), py::arg("dataset"), py::arg("fold"), py::arg("components"),
        py::arg("grid") = std::vector<double>{1, 2, 3, 4, 5, 6, 7, 8, 9, 10});

  py::register_exception<checkpoint_error>(m, "CheckpointError", PyExc_IOError);
  py::register_exception<format_error>(m, "FormatError", PyExc_ValueError);
}
