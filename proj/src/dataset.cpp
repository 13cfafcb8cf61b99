#include <hivecote/dataset.hpp>
#include <hivecote/random.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

namespace hivecote {

  namespace {

    std::string_view trim(std::string_view s) {
      const auto first = s.find_first_not_of(" \t\r\n");
      if (first == std::string_view::npos) { return {}; }
      const auto last = s.find_last_not_of(" \t\r\n");
      return s.substr(first, last - first + 1);
    }

    std::vector<std::string_view> split(std::string_view s, char sep) {
      std::vector<std::string_view> out;
      std::size_t pos = 0;
      while (true) {
        const auto next = s.find(sep, pos);
        out.push_back(s.substr(pos, next == std::string_view::npos ? std::string_view::npos : next - pos));
        if (next == std::string_view::npos) { break; }
        pos = next + 1;
      }
      return out;
    }

    std::vector<std::string_view> split_ws(std::string_view s) {
      std::vector<std::string_view> out;
      std::size_t pos = 0;
      while (pos < s.size()) {
        const auto start = s.find_first_not_of(" \t", pos);
        if (start == std::string_view::npos) { break; }
        const auto end = s.find_first_of(" \t", start);
        out.push_back(s.substr(start, end == std::string_view::npos ? std::string_view::npos : end - start));
        if (end == std::string_view::npos) { break; }
        pos = end;
      }
      return out;
    }

    double parse_value(std::string_view token, std::size_t line) {
      token = trim(token);
      if (token.empty() || token == "?") { throw format_error("missing value", line); }
      if (token.front() == '+') { token.remove_prefix(1); }
      double v = 0;
      const auto [end, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
      if (ec != std::errc{} || end != token.data() + token.size()) {
        throw format_error("cannot parse value '" + std::string(token) + "'", line);
      }
      if (!std::isfinite(v)) { throw format_error("missing value", line); }
      return v;
    }

    std::string lower(std::string_view s) {
      std::string out(s);
      std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
      return out;
    }

    bool parse_bool(std::string_view token, std::size_t line) {
      const auto t = lower(token);
      if (t == "true") { return true; }
      if (t == "false") { return false; }
      throw format_error("expected true/false, got '" + std::string(token) + "'", line);
    }

    std::string read_file(const std::filesystem::path& path) {
      std::ifstream in(path, std::ios::binary);
      if (!in) { throw std::runtime_error("cannot open " + path.string()); }
      std::ostringstream ss;
      ss << in.rdbuf();
      return ss.str();
    }

    void append_number(std::string& out, double v) {
      char buf[32];
      const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
      out.append(buf, end);
    }

  } // namespace

  LabeledSeriesSet::LabeledSeriesSet(std::vector<double> values, std::size_t series_length, std::vector<int> labels,
                                     std::vector<std::string> class_names, std::string name)
    : values_(std::move(values)), length_(series_length), labels_(std::move(labels)),
      class_names_(std::move(class_names)), name_(std::move(name)) {
    if (labels_.empty()) { throw std::invalid_argument("a series set needs at least one case"); }
    if (length_ == 0) { throw std::invalid_argument("series length must be at least 1"); }
    if (values_.size() != labels_.size() * length_) { throw std::invalid_argument("ragged series"); }
    if (class_names_.empty()) { throw std::invalid_argument("class count must be at least 1"); }
    const int c = static_cast<int>(class_names_.size());
    for (const int y: labels_) {
      if (y < 0 || y >= c) { throw std::invalid_argument("label " + std::to_string(y) + " outside [0, " + std::to_string(c) + ")"); }
    }
  }

  LabeledSeriesSet LabeledSeriesSet::from_rows(const std::vector<std::vector<double>>& rows, std::vector<int> labels,
                                               std::size_t class_count) {
    if (rows.empty()) { throw std::invalid_argument("a series set needs at least one case"); }
    const std::size_t m = rows.front().size();
    std::vector<double> values;
    values.reserve(rows.size() * m);
    for (const auto& r: rows) {
      if (r.size() != m) { throw std::invalid_argument("ragged series"); }
      values.insert(values.end(), r.begin(), r.end());
    }
    std::vector<std::string> names;
    for (std::size_t c = 0; c < class_count; ++c) { names.push_back(std::to_string(c)); }
    return {std::move(values), m, std::move(labels), std::move(names)};
  }

  std::vector<std::size_t> LabeledSeriesSet::class_counts() const {
    std::vector<std::size_t> counts(class_count(), 0);
    for (const int y: labels_) { ++counts[static_cast<std::size_t>(y)]; }
    return counts;
  }

  LabeledSeriesSet LabeledSeriesSet::subset(std::span<const std::size_t> indices) const {
    std::vector<double> values;
    values.reserve(indices.size() * length_);
    std::vector<int> labels;
    labels.reserve(indices.size());
    for (const auto i: indices) {
      const auto s = series(i);
      values.insert(values.end(), s.begin(), s.end());
      labels.push_back(labels_[i]);
    }
    return {std::move(values), length_, std::move(labels), class_names_, name_};
  }

  void LabeledSeriesSet::require_all_classes() const {
    const auto counts = class_counts();
    for (std::size_t c = 0; c < counts.size(); ++c) {
      if (counts[c] == 0) { throw std::invalid_argument("class '" + class_names_[c] + "' has no training cases"); }
    }
  }

  void LabeledSeriesSet::require_compatible(const LabeledSeriesSet& other) const {
    if (other.series_length() != length_) { throw std::invalid_argument("series length mismatch between sets"); }
    if (other.class_names() != class_names_) { throw std::invalid_argument("class labels differ between sets"); }
  }

  LabeledSeriesSet parse_ts(std::string_view text, std::string name) {
    std::vector<std::string> class_names;
    bool have_class_labels = false;
    bool in_data = false;
    std::size_t declared_length = 0;
    std::size_t length = 0;
    std::vector<double> values;
    std::vector<int> labels;

    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
      const auto next = text.find('\n', pos);
      const auto raw = text.substr(pos, next == std::string_view::npos ? std::string_view::npos : next - pos);
      pos = next == std::string_view::npos ? text.size() + 1 : next + 1;
      ++line_no;
      const auto line = trim(raw);
      if (line.empty() || line.front() == '#') { continue; }

      if (!in_data) {
        if (line.front() != '@') { throw format_error("expected a header directive before @data", line_no); }
        const auto tokens = split_ws(line);
        const auto tag = lower(tokens[0]);
        const auto arg = [&](std::size_t k) -> std::string_view {
          if (tokens.size() <= k) { throw format_error("directive " + std::string(tokens[0]) + " needs a value", line_no); }
          return tokens[k];
        };
        if (tag == "@problemname") {
          if (name.empty()) { name = std::string(arg(1)); }
        } else if (tag == "@univariate") {
          if (!parse_bool(arg(1), line_no)) { throw format_error("multivariate data is not supported", line_no); }
        } else if (tag == "@equallength") {
          if (!parse_bool(arg(1), line_no)) { throw format_error("unequal length series are not supported", line_no); }
        } else if (tag == "@timestamps") {
          if (parse_bool(arg(1), line_no)) { throw format_error("timestamped data is not supported", line_no); }
        } else if (tag == "@serieslength") {
          const auto v = arg(1);
          const auto [end, ec] = std::from_chars(v.data(), v.data() + v.size(), declared_length);
          if (ec != std::errc{} || end != v.data() + v.size() || declared_length == 0) {
            throw format_error("malformed @seriesLength", line_no);
          }
        } else if (tag == "@classlabel") {
          if (!parse_bool(arg(1), line_no)) { throw format_error("unlabelled data is not supported", line_no); }
          for (std::size_t k = 2; k < tokens.size(); ++k) { class_names.emplace_back(tokens[k]); }
          if (class_names.empty()) { throw format_error("@classLabel lists no labels", line_no); }
          have_class_labels = true;
        } else if (tag == "@data") {
          if (!have_class_labels) { throw format_error("header is missing @classLabel", line_no); }
          in_data = true;
        }
        // other directives (@missing, @dimensions, ...) carry nothing we need
        continue;
      }

      const auto colon = line.rfind(':');
      if (colon == std::string_view::npos) { throw format_error("case has no class label", line_no); }
      const auto body = line.substr(0, colon);
      if (body.find(':') != std::string_view::npos) { throw format_error("multivariate data is not supported", line_no); }
      const auto label_text = trim(line.substr(colon + 1));
      const auto it = std::find(class_names.begin(), class_names.end(), label_text);
      if (it == class_names.end()) {
        throw format_error("label '" + std::string(label_text) + "' not in declared class labels", line_no);
      }
      const auto tokens = split(body, ',');
      if (labels.empty()) {
        length = tokens.size();
        if (declared_length != 0 && declared_length != length) {
          throw format_error("series length " + std::to_string(length) + " differs from @seriesLength", line_no);
        }
      } else if (tokens.size() != length) {
        throw format_error("ragged series: expected " + std::to_string(length) + " values, found " + std::to_string(tokens.size()), line_no);
      }
      for (const auto tok: tokens) { values.push_back(parse_value(tok, line_no)); }
      labels.push_back(static_cast<int>(it - class_names.begin()));
    }
    if (!in_data) { throw format_error(line_no <= 1 && trim(text).empty() ? "empty file" : "header has no @data section", line_no); }
    if (labels.empty()) { throw format_error("empty file: no cases after @data", line_no); }
    return {std::move(values), length, std::move(labels), std::move(class_names), std::move(name)};
  }

  LabeledSeriesSet load_ts_file(const std::filesystem::path& path) {
    return parse_ts(read_file(path), path.stem().string());
  }

  LabeledSeriesSet parse_csv(std::string_view text, std::vector<std::string> class_names, std::string name) {
    const bool fixed_classes = !class_names.empty();
    std::vector<double> values;
    std::vector<int> labels;
    std::size_t length = 0;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
      const auto next = text.find('\n', pos);
      const auto line = trim(text.substr(pos, next == std::string_view::npos ? std::string_view::npos : next - pos));
      pos = next == std::string_view::npos ? text.size() + 1 : next + 1;
      ++line_no;
      if (line.empty()) { continue; }
      const auto tokens = split(line, ',');
      if (tokens.size() < 2) { throw format_error("a case needs at least one value and a label", line_no); }
      if (labels.empty()) {
        length = tokens.size() - 1;
      } else if (tokens.size() - 1 != length) {
        throw format_error("ragged series: expected " + std::to_string(length) + " values, found " + std::to_string(tokens.size() - 1), line_no);
      }
      for (std::size_t k = 0; k + 1 < tokens.size(); ++k) { values.push_back(parse_value(tokens[k], line_no)); }
      const std::string label(trim(tokens.back()));
      auto it = std::find(class_names.begin(), class_names.end(), label);
      if (it == class_names.end()) {
        if (fixed_classes) { throw format_error("label '" + label + "' not in declared class labels", line_no); }
        class_names.push_back(label);
        it = class_names.end() - 1;
      }
      labels.push_back(static_cast<int>(it - class_names.begin()));
    }
    if (labels.empty()) { throw format_error("empty file", line_no); }
    return {std::move(values), length, std::move(labels), std::move(class_names), std::move(name)};
  }

  LabeledSeriesSet load_csv_file(const std::filesystem::path& path, std::vector<std::string> class_names) {
    return parse_csv(read_file(path), std::move(class_names), path.stem().string());
  }

  std::string format_ts(const LabeledSeriesSet& data) {
    std::string out;
    out += "@problemName " + (data.name().empty() ? std::string("unnamed") : data.name()) + "\n";
    out += "@timestamps false\n@missing false\n@univariate true\n@equalLength true\n";
    out += "@seriesLength " + std::to_string(data.series_length()) + "\n";
    out += "@classLabel true";
    for (const auto& c: data.class_names()) { out += " " + c; }
    out += "\n@data\n";
    for (std::size_t i = 0; i < data.size(); ++i) {
      const auto s = data.series(i);
      for (std::size_t t = 0; t < s.size(); ++t) {
        if (t > 0) { out += ','; }
        append_number(out, s[t]);
      }
      out += ':';
      out += data.class_names()[static_cast<std::size_t>(data.label(i))];
      out += '\n';
    }
    return out;
  }

  void write_ts_file(const LabeledSeriesSet& data, const std::filesystem::path& path) {
    if (path.has_parent_path()) { std::filesystem::create_directories(path.parent_path()); }
    std::ofstream out(path, std::ios::binary);
    if (!out) { throw std::runtime_error("cannot write " + path.string()); }
    out << format_ts(data);
  }

  std::pair<LabeledSeriesSet, LabeledSeriesSet> load_train_test(const std::filesystem::path& dir, const std::string& name) {
    const auto ts_train = dir / (name + "_TRAIN.ts");
    const auto ts_test = dir / (name + "_TEST.ts");
    if (std::filesystem::exists(ts_train) && std::filesystem::exists(ts_test)) {
      auto train = load_ts_file(ts_train);
      auto test = load_ts_file(ts_test);
      train.require_compatible(test);
      return {std::move(train), std::move(test)};
    }
    const auto csv_train = dir / (name + "_TRAIN.csv");
    const auto csv_test = dir / (name + "_TEST.csv");
    if (std::filesystem::exists(csv_train) && std::filesystem::exists(csv_test)) {
      auto train = load_csv_file(csv_train);
      // the test file may not contain every class, so reuse the train label order
      auto names = train.class_names();
      auto test_text = read_file(csv_test);
      auto probe = parse_csv(test_text);
      for (const auto& c: probe.class_names()) {
        if (std::find(names.begin(), names.end(), c) == names.end()) { names.push_back(c); }
      }
      if (names.size() != train.class_names().size()) {
        train = LabeledSeriesSet(train.values(), train.series_length(), train.labels(), names, train.name());
      }
      auto test = parse_csv(test_text, names, csv_test.stem().string());
      train.require_compatible(test);
      return {std::move(train), std::move(test)};
    }
    throw std::runtime_error("no " + name + "_TRAIN/_TEST .ts or .csv files under " + dir.string());
  }

  std::pair<LabeledSeriesSet, LabeledSeriesSet> resample(const LabeledSeriesSet& train, const LabeledSeriesSet& test, int fold) {
    if (fold < 1) { throw std::invalid_argument("fold must be >= 1"); }
    train.require_compatible(test);
    if (fold == 1) { return {train, test}; }

    const std::size_t n = train.size() + test.size();
    const auto label_of = [&](std::size_t i) { return i < train.size() ? train.label(i) : test.label(i - train.size()); };
    const auto train_counts = train.class_counts();

    Rng rng = make_rng(static_cast<std::uint64_t>(fold), 0);
    std::vector<std::size_t> train_idx;
    std::vector<std::size_t> test_idx;
    for (std::size_t c = 0; c < train.class_count(); ++c) {
      std::vector<std::size_t> members;
      for (std::size_t i = 0; i < n; ++i) {
        if (static_cast<std::size_t>(label_of(i)) == c) { members.push_back(i); }
      }
      shuffle(members, rng);
      const std::size_t take = std::min(train_counts[c], members.size());
      train_idx.insert(train_idx.end(), members.begin(), members.begin() + static_cast<std::ptrdiff_t>(take));
      test_idx.insert(test_idx.end(), members.begin() + static_cast<std::ptrdiff_t>(take), members.end());
    }
    std::sort(train_idx.begin(), train_idx.end());
    std::sort(test_idx.begin(), test_idx.end());

    const std::size_t m = train.series_length();
    const auto gather = [&](const std::vector<std::size_t>& idx, const std::string& name) {
      std::vector<double> values;
      values.reserve(idx.size() * m);
      std::vector<int> labels;
      for (const auto i: idx) {
        const auto s = i < train.size() ? train.series(i) : test.series(i - train.size());
        values.insert(values.end(), s.begin(), s.end());
        labels.push_back(label_of(i));
      }
      return LabeledSeriesSet(std::move(values), m, std::move(labels), train.class_names(), name);
    };
    return {gather(train_idx, train.name()), gather(test_idx, test.name())};
  }

  std::pair<double, double> mean_and_std(std::span<const double> values) {
    if (values.empty()) { return {0.0, 0.0}; }
    const double n = static_cast<double>(values.size());
    const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
    double ss = 0;
    for (const double v: values) { ss += (v - mean) * (v - mean); }
    return {mean, std::sqrt(ss / n)};
  }

  std::vector<double> z_normalize(std::span<const double> segment) {
    std::vector<double> out(segment.size(), 0.0);
    const auto [mean, sd] = mean_and_std(segment);
    if (sd <= sigma_floor) { return out; }
    for (std::size_t i = 0; i < segment.size(); ++i) { out[i] = (segment[i] - mean) / sd; }
    return out;
  }

} // namespace hivecote
