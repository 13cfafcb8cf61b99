#include <hivecote/rotation_forest.hpp>

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace hivecote {

  namespace {

    RotationGroup identity_group(std::vector<std::size_t> attributes) {
      const std::size_t k = attributes.size();
      RotationGroup g{std::move(attributes), std::vector<double>(k, 0.0), std::vector<double>(k * k, 0.0)};
      for (std::size_t i = 0; i < k; ++i) { g.projection[i * k + i] = 1.0; }
      return g;
    }

    RotationGroup fit_group(const FeatureMatrix& data, std::vector<std::size_t> attributes,
                            const std::vector<std::size_t>& sample) {
      const std::size_t k = attributes.size();
      const auto n = static_cast<Eigen::Index>(sample.size());
      Eigen::MatrixXd x(n, static_cast<Eigen::Index>(k));
      for (Eigen::Index r = 0; r < n; ++r) {
        for (std::size_t j = 0; j < k; ++j) {
          x(r, static_cast<Eigen::Index>(j)) = data.at(sample[static_cast<std::size_t>(r)], attributes[j]);
        }
      }
      const Eigen::VectorXd mean = x.colwise().mean();
      x.rowwise() -= mean.transpose();
      const Eigen::MatrixXd cov = (x.transpose() * x) / static_cast<double>(n);
      if (cov.trace() <= 1e-12) { return identity_group(std::move(attributes)); }

      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
      if (solver.info() != Eigen::Success) { return identity_group(std::move(attributes)); }
      const Eigen::MatrixXd& vectors = solver.eigenvectors();

      RotationGroup g{std::move(attributes), std::vector<double>(k), std::vector<double>(k * k)};
      for (std::size_t i = 0; i < k; ++i) { g.mean[i] = mean(static_cast<Eigen::Index>(i)); }
      // eigenvalues come ascending; emit components largest first with a canonical sign
      for (std::size_t comp = 0; comp < k; ++comp) {
        const auto col = static_cast<Eigen::Index>(k - 1 - comp);
        Eigen::Index pivot = 0;
        vectors.col(col).cwiseAbs().maxCoeff(&pivot);
        const double sign = vectors(pivot, col) < 0 ? -1.0 : 1.0;
        for (std::size_t i = 0; i < k; ++i) {
          g.projection[i * k + comp] = sign * vectors(static_cast<Eigen::Index>(i), col);
        }
      }
      return g;
    }

  } // namespace

  std::vector<double> RotationForest::Member::rotate(std::span<const double> row) const {
    std::vector<double> out;
    for (const auto& g: groups) {
      const std::size_t k = g.attributes.size();
      for (std::size_t comp = 0; comp < k; ++comp) {
        double v = 0.0;
        for (std::size_t i = 0; i < k; ++i) { v += (row[g.attributes[i]] - g.mean[i]) * g.projection[i * k + comp]; }
        out.push_back(v);
      }
    }
    return out;
  }

  RotationForest RotationForest::fit(const FeatureMatrix& data, const RotationForestConfig& config, std::uint64_t seed) {
    if (data.rows == 0 || data.cols == 0) { throw std::invalid_argument("rotation forest needs a non-empty matrix"); }
    if (config.group_size < 1) { throw std::invalid_argument("group_size must be >= 1"); }
    if (config.tree_count < 1) { throw std::invalid_argument("tree_count must be >= 1"); }

    RotationForest forest;
    forest.class_count_ = data.class_count;
    const std::size_t d = data.cols;
    const std::size_t c = data.class_count;

    for (std::size_t t = 0; t < config.tree_count; ++t) {
      Rng rng = make_rng(seed, t);
      std::vector<std::size_t> order(d);
      std::iota(order.begin(), order.end(), std::size_t{0});
      shuffle(order, rng);

      Member member;
      for (std::size_t start = 0; start < d; start += config.group_size) {
        std::vector<std::size_t> attributes(order.begin() + static_cast<std::ptrdiff_t>(start),
                                            order.begin() + static_cast<std::ptrdiff_t>(std::min(d, start + config.group_size)));
        if (config.force_identity) {
          member.groups.push_back(identity_group(std::move(attributes)));
          continue;
        }
        std::vector<bool> keep(c, false);
        bool any = false;
        for (std::size_t k = 0; k < c; ++k) {
          keep[k] = uniform_real(rng) < config.class_subsample;
          any = any || keep[k];
        }
        if (!any) { keep[uniform_index(rng, c)] = true; }
        std::vector<std::size_t> pool;
        for (std::size_t i = 0; i < data.rows; ++i) {
          if (keep[static_cast<std::size_t>(data.labels[i])]) { pool.push_back(i); }
        }
        if (pool.empty()) {
          member.groups.push_back(identity_group(std::move(attributes)));
          continue;
        }
        shuffle(pool, rng);
        const auto take = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(config.case_subsample * static_cast<double>(pool.size()))));
        pool.resize(std::min(take, pool.size()));
        member.groups.push_back(fit_group(data, std::move(attributes), pool));
      }

      FeatureMatrix rotated(data.rows, d, data.labels, c);
      for (std::size_t i = 0; i < data.rows; ++i) {
        const auto r = member.rotate(data.row(i));
        std::copy(r.begin(), r.end(), rotated.row(i).begin());
      }
      member.tree = build_time_series_tree(rotated);
      forest.members_.push_back(std::move(member));
    }
    return forest;
  }

  Probabilities RotationForest::predict_proba(std::span<const double> row) const {
    Probabilities p(class_count_, 0.0);
    for (const auto& m: members_) {
      const auto& dist = m.tree.distribution(m.rotate(row));
      for (std::size_t k = 0; k < class_count_; ++k) { p[k] += dist[k]; }
    }
    for (auto& v: p) { v /= static_cast<double>(members_.size()); }
    return p;
  }

} // namespace hivecote
