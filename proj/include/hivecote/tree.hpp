#pragma once

#include <hivecote/random.hpp>

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace hivecote {

  /// Row-major n x d attribute matrix with class labels.
  struct FeatureMatrix {
    std::vector<double> values;
    std::size_t rows{0};
    std::size_t cols{0};
    std::vector<int> labels;
    std::size_t class_count{0};

    FeatureMatrix() = default;
    FeatureMatrix(std::size_t n, std::size_t d, std::vector<int> y, std::size_t c)
      : values(n * d, 0.0), rows(n), cols(d), labels(std::move(y)), class_count(c) {}

    [[nodiscard]] std::span<const double> row(std::size_t i) const { return {values.data() + i * cols, cols}; }
    [[nodiscard]] std::span<double> row(std::size_t i) { return {values.data() + i * cols, cols}; }
    [[nodiscard]] double at(std::size_t i, std::size_t j) const { return values[i * cols + j]; }
    double& at(std::size_t i, std::size_t j) { return values[i * cols + j]; }

    [[nodiscard]] FeatureMatrix select_rows(std::span<const std::size_t> indices) const;
  };

  /// Flattened tree node. Leaves have attribute < 0 and carry a class distribution.
  struct TreeNode {
    std::int32_t attribute{-1};
    double threshold{0.0};
    std::uint32_t left{0};
    std::uint32_t right{0};
    std::vector<double> distribution;

    [[nodiscard]] bool is_leaf() const { return attribute < 0; }

    template<class Archive> void serialize(Archive& ar) { ar(attribute, threshold, left, right, distribution); }
  };

  class DecisionTree {
  public:
    DecisionTree() = default;
    DecisionTree(std::vector<TreeNode> nodes, std::size_t class_count) : nodes_(std::move(nodes)), class_count_(class_count) {}

    /// Class distribution of the leaf reached by `row` (value <= threshold goes left).
    [[nodiscard]] const std::vector<double>& distribution(std::span<const double> row) const;

    /// Argmax of the leaf distribution, lowest class index on ties.
    [[nodiscard]] int vote(std::span<const double> row) const;

    [[nodiscard]] const std::vector<TreeNode>& nodes() const { return nodes_; }
    [[nodiscard]] const TreeNode& root() const { return nodes_.front(); }
    [[nodiscard]] std::size_t class_count() const { return class_count_; }
    [[nodiscard]] std::size_t depth() const;

    friend bool operator==(const DecisionTree& a, const DecisionTree& b);

    template<class Archive> void serialize(Archive& ar) { ar(nodes_, class_count_); }

  private:
    std::vector<TreeNode> nodes_;
    std::size_t class_count_{0};
  };

  bool operator==(const TreeNode& a, const TreeNode& b);

  /// Unlimited-depth tree choosing, at every node, the split with the highest information
  /// gain over all attributes. Candidate thresholds are midpoints between adjacent distinct
  /// values at class boundaries. Gain ties go to the wider gap between the two values, then
  /// to the lowest attribute index.
  DecisionTree build_time_series_tree(const FeatureMatrix& data);

  /// Random-forest style tree: each node scores a fresh random subset of attributes, and keeps
  /// drawing further attributes one at a time while none of them yields a positive gain.
  DecisionTree build_random_tree(const FeatureMatrix& data, std::size_t attributes_per_split, Rng& rng);

  /// floor(sqrt(d)), at least 1.
  std::size_t default_attributes_per_split(std::size_t d);

  /// Shannon entropy in bits of a class count vector.
  double entropy(std::span<const std::size_t> counts);

} // namespace hivecote
