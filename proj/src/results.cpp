#include <hivecote/dataset.hpp>
#include <hivecote/results.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace hivecote {

  namespace {

    double round6(double v) {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.6g", v);
      return std::strtod(buf, nullptr);
    }

    std::string shortest(double v) {
      char buf[32];
      const auto r = std::to_chars(buf, buf + sizeof buf, v);
      return std::string(buf, r.ptr);
    }

    std::vector<std::string_view> split_commas(std::string_view line) {
      std::vector<std::string_view> out;
      std::size_t pos = 0;
      while (true) {
        const auto next = line.find(',', pos);
        out.push_back(line.substr(pos, next == std::string_view::npos ? std::string_view::npos : next - pos));
        if (next == std::string_view::npos) { break; }
        pos = next + 1;
      }
      return out;
    }

    template<typename T>
    T parse_number(std::string_view field, std::size_t line, const char* what) {
      T value{};
      const auto* end = field.data() + field.size();
      const auto r = std::from_chars(field.data(), end, value);
      if (field.empty() || r.ec != std::errc() || r.ptr != end) {
        throw format_error(std::string("bad ") + what + " '" + std::string(field) + "'", line);
      }
      return value;
    }

  } // namespace

  Probabilities quantize_probabilities(std::span<const double> p) {
    Probabilities q(p.size());
    if (q.empty()) { return q; }
    double sum = 0.0;
    bool on_grid = true;
    for (std::size_t j = 0; j < p.size(); ++j) {
      q[j] = round6(p[j]);
      on_grid = on_grid && q[j] == p[j];
      sum += q[j];
    }
    // already quantised: leave untouched so the operation is idempotent
    if (on_grid && std::abs(sum - 1.0) <= 1e-6) { return q; }
    const std::size_t top = static_cast<std::size_t>(std::max_element(q.begin(), q.end()) - q.begin());
    q[top] = round6(q[top] + (1.0 - sum));
    return q;
  }

  double row_accuracy(const std::vector<ResultRow>& rows) {
    if (rows.empty()) { return 0.0; }
    std::size_t correct = 0;
    for (const auto& r: rows) { correct += r.true_label == r.predicted_label ? 1 : 0; }
    return static_cast<double>(correct) / static_cast<double>(rows.size());
  }

  void validate_result(const ClassifierResult& result) {
    if (result.rows.empty()) { throw std::invalid_argument("result has no rows"); }
    const std::size_t c = result.rows.front().probabilities.size();
    if (c == 0) { throw std::invalid_argument("result rows carry no probabilities"); }
    for (std::size_t i = 0; i < result.rows.size(); ++i) {
      const auto& r = result.rows[i];
      const auto where = " (row " + std::to_string(i + 1) + ")";
      if (r.probabilities.size() != c) { throw std::invalid_argument("inconsistent probability count" + where); }
      const auto in_range = [&](int y) { return y >= 0 && static_cast<std::size_t>(y) < c; };
      if (!in_range(r.true_label) || !in_range(r.predicted_label)) { throw std::invalid_argument("label out of range" + where); }
      double sum = 0.0;
      for (const double v: r.probabilities) {
        if (!(v >= 0.0 && v <= 1.0 + 1e-6)) { throw std::invalid_argument("probability outside [0, 1]" + where); }
        sum += v;
      }
      if (std::abs(sum - 1.0) > 1e-6) { throw std::invalid_argument("probabilities do not sum to 1" + where); }
    }
    if (std::abs(row_accuracy(result.rows) - result.accuracy) > 1e-12) {
      throw std::invalid_argument("stored accuracy " + shortest(result.accuracy) + " does not match the rows ("
                                  + shortest(row_accuracy(result.rows)) + ")");
    }
  }

  std::string format_result(const ClassifierResult& result) {
    validate_result(result);
    for (const auto* field: {&result.dataset, &result.classifier, &result.split, &result.parameters}) {
      if (field->find('\n') != std::string::npos) { throw std::invalid_argument("result header fields cannot contain newlines"); }
    }
    std::string out;
    out += result.dataset + "," + result.classifier + "," + result.split + "\n";
    out += result.parameters + "\n";
    out += shortest(result.accuracy) + "," + std::to_string(result.build_time_ns) + "," + std::to_string(result.test_time_ns) + "\n";
    char buf[32];
    for (const auto& r: result.rows) {
      out += std::to_string(r.true_label) + "," + std::to_string(r.predicted_label) + ",";
      for (const double v: r.probabilities) {
        std::snprintf(buf, sizeof buf, "%.6g", v);
        out += ",";
        out += buf;
      }
      out += "\n";
    }
    return out;
  }

  ClassifierResult parse_result(std::string_view text) {
    std::vector<std::string_view> lines;
    std::size_t pos = 0;
    while (pos < text.size()) {
      auto next = text.find('\n', pos);
      if (next == std::string_view::npos) { next = text.size(); }
      auto line = text.substr(pos, next - pos);
      if (!line.empty() && line.back() == '\r') { line.remove_suffix(1); }
      lines.push_back(line);
      pos = next + 1;
    }
    while (!lines.empty() && lines.back().empty()) { lines.pop_back(); }
    if (lines.size() < 4) { throw format_error("results file needs three header lines and at least one row", lines.size() + 1); }

    ClassifierResult r;
    const auto head = split_commas(lines[0]);
    if (head.size() != 3) { throw format_error("expected 'dataset,classifier,split'", 1); }
    r.dataset = head[0];
    r.classifier = head[1];
    r.split = head[2];
    r.parameters = lines[1];
    const auto stats = split_commas(lines[2]);
    if (stats.size() != 3) { throw format_error("expected 'accuracy,buildTimeNanos,testTimeNanos'", 3); }
    r.accuracy = parse_number<double>(stats[0], 3, "accuracy");
    r.build_time_ns = parse_number<std::int64_t>(stats[1], 3, "build time");
    r.test_time_ns = parse_number<std::int64_t>(stats[2], 3, "test time");

    for (std::size_t k = 3; k < lines.size(); ++k) {
      const std::size_t line_no = k + 1;
      const auto fields = split_commas(lines[k]);
      if (fields.size() < 4 || !fields[2].empty()) { throw format_error("expected 'true,pred,,p0,...'", line_no); }
      ResultRow row;
      row.true_label = parse_number<int>(fields[0], line_no, "true label");
      row.predicted_label = parse_number<int>(fields[1], line_no, "predicted label");
      for (std::size_t j = 3; j < fields.size(); ++j) { row.probabilities.push_back(parse_number<double>(fields[j], line_no, "probability")); }
      if (!r.rows.empty() && row.probabilities.size() != r.rows.front().probabilities.size()) {
        throw format_error("row has a different number of probabilities", line_no);
      }
      double sum = 0.0;
      for (const double v: row.probabilities) { sum += v; }
      if (std::abs(sum - 1.0) > 1e-6) { throw format_error("probabilities do not sum to 1", line_no); }
      r.rows.push_back(std::move(row));
    }
    try {
      validate_result(r);
    } catch (const std::invalid_argument& e) {
      throw format_error(e.what(), 3);
    }
    return r;
  }

  void write_result(const ClassifierResult& result, const std::filesystem::path& path) {
    const auto text = format_result(result);
    if (path.has_parent_path()) { std::filesystem::create_directories(path.parent_path()); }
    const auto tmp = path.string() + ".tmp";
    {
      std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
      if (!out) { throw std::runtime_error("cannot write " + tmp); }
      out << text;
      if (!out) { throw std::runtime_error("write failed for " + tmp); }
    }
    std::filesystem::rename(tmp, path);
  }

  ClassifierResult read_result(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) { throw std::runtime_error("cannot open " + path.string()); }
    std::ostringstream ss;
    ss << in.rdbuf();
    try {
      return parse_result(ss.str());
    } catch (const format_error& e) {
      throw format_error(path.string() + ": " + e.what(), 0);
    }
  }

  std::vector<ResultRow> make_rows(std::span<const int> truth, const std::vector<Probabilities>& probabilities) {
    if (truth.size() != probabilities.size()) { throw std::invalid_argument("one probability vector per case is required"); }
    std::vector<ResultRow> rows;
    rows.reserve(truth.size());
    for (std::size_t i = 0; i < truth.size(); ++i) {
      auto q = quantize_probabilities(probabilities[i]);
      const int pred = argmax(q);
      rows.push_back({truth[i], pred, std::move(q)});
    }
    return rows;
  }

  void quantize_estimate(TrainEstimate& estimate, std::span<const int> truth) {
    const auto rows = make_rows(truth, estimate.probabilities);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      estimate.probabilities[i] = rows[i].probabilities;
      estimate.predictions[i] = rows[i].predicted_label;
    }
    estimate.accuracy = row_accuracy(rows);
  }

  ResultSummary score(const ClassifierResult& result) {
    ResultSummary s;
    s.accuracy = row_accuracy(result.rows);
    std::map<int, std::pair<std::size_t, std::size_t>> per_class;
    for (const auto& r: result.rows) {
      auto& [hit, total] = per_class[r.true_label];
      ++total;
      hit += r.true_label == r.predicted_label ? 1 : 0;
    }
    for (const auto& [label, counts]: per_class) {
      s.recall[label] = static_cast<double>(counts.first) / static_cast<double>(counts.second);
    }
    s.build_hours = static_cast<double>(result.build_time_ns) / 3.6e12;
    s.build_minutes = static_cast<double>(result.build_time_ns) / 6e10;
    s.test_hours = static_cast<double>(result.test_time_ns) / 3.6e12;
    s.test_minutes = static_cast<double>(result.test_time_ns) / 6e10;
    return s;
  }

} // namespace hivecote
