#pragma once

#include <hivecote/probability.hpp>
#include <hivecote/tree.hpp>

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace hivecote {

  struct RotationForestConfig {
    std::size_t tree_count{200};
    std::size_t group_size{3};
    /// Probability of keeping each class when drawing the PCA sample of a group.
    double class_subsample{0.5};
    /// Fraction of the retained-class cases used to fit a group's PCA.
    double case_subsample{0.75};
    /// Replace every rotation by the identity (no centring). Used to check the degenerate case.
    bool force_identity{false};

    template<class Archive> void serialize(Archive& ar) {
      ar(tree_count, group_size, class_subsample, case_subsample, force_identity);
    }
  };

  /// Attributes of one group, the mean removed before projection and the k x k
  /// projection (row-major: entry [i * k + j] maps input i to component j).
  struct RotationGroup {
    std::vector<std::size_t> attributes;
    std::vector<double> mean;
    std::vector<double> projection;

    template<class Archive> void serialize(Archive& ar) { ar(attributes, mean, projection); }
  };

  class RotationForest {
  public:
    struct Member {
      std::vector<RotationGroup> groups;
      DecisionTree tree;

      [[nodiscard]] std::vector<double> rotate(std::span<const double> row) const;

      template<class Archive> void serialize(Archive& ar) { ar(groups, tree); }
    };

    RotationForest() = default;

    static RotationForest fit(const FeatureMatrix& data, const RotationForestConfig& config, std::uint64_t seed);

    /// Mean of the member trees' leaf distributions.
    [[nodiscard]] Probabilities predict_proba(std::span<const double> row) const;

    [[nodiscard]] const std::vector<Member>& members() const { return members_; }
    [[nodiscard]] std::size_t class_count() const { return class_count_; }
    [[nodiscard]] bool empty() const { return members_.empty(); }

    template<class Archive> void serialize(Archive& ar) { ar(members_, class_count_); }

  private:
    std::vector<Member> members_;
    std::size_t class_count_{0};
  };

} // namespace hivecote
