#include <hivecote/tree.hpp>
#include <hivecote/probability.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace hivecote {

  namespace {

    constexpr double gain_epsilon = 1e-12;

    struct SplitCandidate {
      bool valid{false};
      double gain{0.0};
      double margin{0.0};
      double threshold{0.0};
      std::size_t attribute{0};
    };

    /// true if `a` should replace `b` as the incumbent
    bool better(const SplitCandidate& a, const SplitCandidate& b) {
      if (!a.valid) { return false; }
      if (!b.valid) { return true; }
      if (a.gain > b.gain + gain_epsilon) { return true; }
      if (a.gain < b.gain - gain_epsilon) { return false; }
      if (a.margin != b.margin) { return a.margin > b.margin; }
      return a.attribute < b.attribute;
    }

    double entropy_of(std::span<const std::size_t> counts, std::size_t total) {
      if (total == 0) { return 0.0; }
      double acc = 0.0;
      for (const auto k: counts) {
        if (k > 0) { acc += static_cast<double>(k) * std::log2(static_cast<double>(k)); }
      }
      const double n = static_cast<double>(total);
      return std::log2(n) - acc / n;
    }

    class Builder {
    public:
      Builder(const FeatureMatrix& data, std::size_t attributes_per_split, Rng* rng)
        : data_(data), per_split_(attributes_per_split), rng_(rng), c_(data.class_count) {}

      DecisionTree run() {
        if (data_.rows == 0) { throw std::invalid_argument("cannot build a tree on an empty matrix"); }
        // column-major copy: split search reads one attribute across many cases
        columns_.resize(data_.values.size());
        for (std::size_t i = 0; i < data_.rows; ++i) {
          for (std::size_t a = 0; a < data_.cols; ++a) { columns_[a * data_.rows + i] = data_.values[i * data_.cols + a]; }
        }
        xlogx_.resize(data_.rows + 1);
        log2_.resize(data_.rows + 1);
        for (std::size_t k = 0; k <= data_.rows; ++k) {
          const double x = static_cast<double>(k);
          xlogx_[k] = k > 0 ? x * std::log2(x) : 0.0;
          log2_[k] = k > 0 ? std::log2(x) : 0.0;
        }
        std::vector<std::size_t> all(data_.rows);
        std::iota(all.begin(), all.end(), std::size_t{0});
        nodes_.emplace_back();
        struct Pending { std::uint32_t node; std::vector<std::size_t> cases; };
        std::vector<Pending> stack;
        stack.push_back({0, std::move(all)});
        while (!stack.empty()) {
          Pending job = std::move(stack.back());
          stack.pop_back();
          std::vector<std::size_t> counts(c_, 0);
          for (const auto i: job.cases) { ++counts[static_cast<std::size_t>(data_.labels[i])]; }
          const auto nonzero = std::count_if(counts.begin(), counts.end(), [](std::size_t k) { return k > 0; });

          SplitCandidate best;
          if (nonzero > 1 && job.cases.size() > 1) { best = find_split(job.cases, counts); }

          if (!best.valid) {
            auto& leaf = nodes_[job.node];
            leaf.attribute = -1;
            leaf.distribution.assign(c_, 0.0);
            for (std::size_t k = 0; k < c_; ++k) {
              leaf.distribution[k] = static_cast<double>(counts[k]) / static_cast<double>(job.cases.size());
            }
            continue;
          }

          std::vector<std::size_t> left;
          std::vector<std::size_t> right;
          for (const auto i: job.cases) {
            (data_.at(i, best.attribute) <= best.threshold ? left : right).push_back(i);
          }
          const auto left_id = static_cast<std::uint32_t>(nodes_.size());
          nodes_.emplace_back();
          const auto right_id = static_cast<std::uint32_t>(nodes_.size());
          nodes_.emplace_back();
          auto& node = nodes_[job.node];
          node.attribute = static_cast<std::int32_t>(best.attribute);
          node.threshold = best.threshold;
          node.left = left_id;
          node.right = right_id;
          // right pushed first so the left subtree is expanded first
          stack.push_back({right_id, std::move(right)});
          stack.push_back({left_id, std::move(left)});
        }
        return {std::move(nodes_), c_};
      }

    private:
      SplitCandidate find_split(const std::vector<std::size_t>& cases, const std::vector<std::size_t>& counts) {
        const double parent_entropy = entropy_of(counts, cases.size());
        SplitCandidate best;
        if (rng_ == nullptr || per_split_ >= data_.cols) {
          for (std::size_t a = 0; a < data_.cols; ++a) {
            const auto cand = evaluate(cases, counts, parent_entropy, a);
            if (better(cand, best)) { best = cand; }
          }
          return best;
        }
        // lazy Fisher-Yates over the attribute indices
        std::vector<std::size_t> order(data_.cols);
        std::iota(order.begin(), order.end(), std::size_t{0});
        for (std::size_t k = 0; k < data_.cols; ++k) {
          const std::size_t j = k + uniform_index(*rng_, data_.cols - k);
          std::swap(order[k], order[j]);
          const auto cand = evaluate(cases, counts, parent_entropy, order[k]);
          if (better(cand, best)) { best = cand; }
          if (k + 1 >= per_split_ && best.valid) { break; }
        }
        return best;
      }

      SplitCandidate evaluate(const std::vector<std::size_t>& cases, const std::vector<std::size_t>& counts,
                              double parent_entropy, std::size_t attribute) {
        const std::size_t n = cases.size();
        const double* column = columns_.data() + attribute * data_.rows;
        sorted_.resize(n);
        for (std::size_t k = 0; k < n; ++k) {
          const auto i = cases[k];
          sorted_[k] = {column[i], data_.labels[i]};
        }
        std::sort(sorted_.begin(), sorted_.end());

        // class of each run of equal values, or -1 when the run is mixed
        group_class_.clear();
        group_end_.clear();
        for (std::size_t k = 0; k < n; ++k) {
          if (k == 0 || sorted_[k].first != sorted_[k - 1].first) {
            group_class_.push_back(sorted_[k].second);
            group_end_.push_back(k);
          } else if (group_class_.back() != sorted_[k].second) {
            group_class_.back() = -1;
          }
          group_end_.back() = k;
        }

        SplitCandidate best;
        left_.assign(c_, 0);
        right_.assign(counts.begin(), counts.end());
        std::size_t k = 0;
        for (std::size_t g = 0; g + 1 < group_class_.size(); ++g) {
          for (; k <= group_end_[g]; ++k) {
            const auto y = static_cast<std::size_t>(sorted_[k].second);
            ++left_[y];
            --right_[y];
          }
          if (group_class_[g] >= 0 && group_class_[g] == group_class_[g + 1]) { continue; }
          const std::size_t nl = group_end_[g] + 1;
          const std::size_t nr = n - nl;
          const double gain = parent_entropy
            - (static_cast<double>(nl) / static_cast<double>(n)) * table_entropy(left_, nl)
            - (static_cast<double>(nr) / static_cast<double>(n)) * table_entropy(right_, nr);
          const double lo = sorted_[group_end_[g]].first;
          const double hi = sorted_[group_end_[g] + 1].first;
          SplitCandidate cand{true, gain, hi - lo, lo + (hi - lo) / 2.0, attribute};
          if (!(cand.threshold >= lo && cand.threshold < hi)) { cand.threshold = lo; }
          if (gain <= gain_epsilon) { continue; }
          if (better(cand, best)) { best = cand; }
        }
        return best;
      }

      /// entropy_of without the logarithm calls
      double table_entropy(const std::vector<std::size_t>& counts, std::size_t total) const {
        if (total == 0) { return 0.0; }
        double acc = 0.0;
        for (const auto k: counts) { acc += xlogx_[k]; }
        return log2_[total] - acc / static_cast<double>(total);
      }

      const FeatureMatrix& data_;
      std::vector<double> columns_;
      std::vector<double> xlogx_;
      std::vector<double> log2_;
      std::size_t per_split_;
      Rng* rng_;
      std::size_t c_;
      std::vector<TreeNode> nodes_;
      std::vector<std::pair<double, int>> sorted_;
      std::vector<int> group_class_;
      std::vector<std::size_t> group_end_;
      std::vector<std::size_t> left_;
      std::vector<std::size_t> right_;
    };

  } // namespace

  FeatureMatrix FeatureMatrix::select_rows(std::span<const std::size_t> indices) const {
    FeatureMatrix out;
    out.rows = indices.size();
    out.cols = cols;
    out.class_count = class_count;
    out.values.reserve(indices.size() * cols);
    out.labels.reserve(indices.size());
    for (const auto i: indices) {
      const auto r = row(i);
      out.values.insert(out.values.end(), r.begin(), r.end());
      out.labels.push_back(labels[i]);
    }
    return out;
  }

  const std::vector<double>& DecisionTree::distribution(std::span<const double> row) const {
    std::size_t at = 0;
    while (!nodes_[at].is_leaf()) {
      const auto& node = nodes_[at];
      at = row[static_cast<std::size_t>(node.attribute)] <= node.threshold ? node.left : node.right;
    }
    return nodes_[at].distribution;
  }

  int DecisionTree::vote(std::span<const double> row) const { return argmax(distribution(row)); }

  std::size_t DecisionTree::depth() const {
    if (nodes_.empty()) { return 0; }
    std::vector<std::pair<std::size_t, std::size_t>> stack{{0, 1}};
    std::size_t deepest = 0;
    while (!stack.empty()) {
      const auto [at, d] = stack.back();
      stack.pop_back();
      deepest = std::max(deepest, d);
      if (!nodes_[at].is_leaf()) {
        stack.emplace_back(nodes_[at].left, d + 1);
        stack.emplace_back(nodes_[at].right, d + 1);
      }
    }
    return deepest;
  }

  bool operator==(const TreeNode& a, const TreeNode& b) {
    return a.attribute == b.attribute && a.threshold == b.threshold && a.left == b.left && a.right == b.right
      && a.distribution == b.distribution;
  }

  bool operator==(const DecisionTree& a, const DecisionTree& b) {
    return a.class_count_ == b.class_count_ && a.nodes_ == b.nodes_;
  }

  DecisionTree build_time_series_tree(const FeatureMatrix& data) {
    return Builder(data, data.cols, nullptr).run();
  }

  DecisionTree build_random_tree(const FeatureMatrix& data, std::size_t attributes_per_split, Rng& rng) {
    if (attributes_per_split < 1 || attributes_per_split > data.cols) {
      throw std::invalid_argument("attributes_per_split must be in [1, d]");
    }
    return Builder(data, attributes_per_split, &rng).run();
  }

  std::size_t default_attributes_per_split(std::size_t d) {
    auto k = static_cast<std::size_t>(std::floor(std::sqrt(static_cast<double>(d))));
    while ((k + 1) * (k + 1) <= d) { ++k; }
    while (k * k > d) { --k; }
    return std::max<std::size_t>(k, 1);
  }

  double entropy(std::span<const std::size_t> counts) {
    return entropy_of(counts, std::accumulate(counts.begin(), counts.end(), std::size_t{0}));
  }

} // namespace hivecote
