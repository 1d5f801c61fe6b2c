#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "uqalign/core.hpp"

namespace uqalign {

struct TreeParams {
  std::size_t num_trees = 20;
  std::size_t max_depth = 5;
};

/// Axis-aligned classification tree grown by greedy Gini splits. Leaves hold
/// Laplace-smoothed class frequencies (n_k + 1) / (n + K).
class DecisionTree {
 public:
  /// Grows a tree on `rows` of `data` (repeats allowed, as in a bootstrap).
  /// A node becomes a leaf at max_depth, when pure, with fewer than 2 rows,
  /// or when no threshold reduces the impurity.
  static DecisionTree fit(const Dataset& data, std::span<const std::size_t> rows,
                          std::size_t max_depth);

  /// Leaf distribution reached by `x`; x[f] <= threshold goes left.
  [[nodiscard]] const Categorical& predict(std::span<const double> x) const;

  [[nodiscard]] std::size_t num_nodes() const noexcept { return nodes_.size(); }
  [[nodiscard]] std::size_t num_leaves() const noexcept { return leaves_.size(); }
  [[nodiscard]] std::size_t depth() const noexcept { return depth_; }
  [[nodiscard]] const std::vector<Categorical>& leaves() const noexcept { return leaves_; }

  friend bool operator==(const DecisionTree&, const DecisionTree&) = default;

 private:
  struct Node {
    std::size_t feature = 0;
    double threshold = 0.0;
    std::uint32_t left = 0;
    std::uint32_t right = 0;
    std::int32_t leaf = -1;  ///< index into leaves_, or -1 for split nodes

    friend bool operator==(const Node&, const Node&) = default;
  };

  class Builder;

  std::vector<Node> nodes_;
  std::vector<Categorical> leaves_;
  std::size_t depth_ = 0;
};

/// Bootstrap-aggregated trees; each tree contributes one member of the
/// second-order prediction.
class BaggedTreesModel {
 public:
  BaggedTreesModel(std::vector<DecisionTree> trees, std::size_t num_features,
                   std::size_t num_classes, std::size_t max_depth, Seed seed);

  [[nodiscard]] const std::vector<DecisionTree>& trees() const noexcept { return trees_; }
  [[nodiscard]] std::size_t num_trees() const noexcept { return trees_.size(); }
  [[nodiscard]] std::size_t num_features() const noexcept { return num_features_; }
  [[nodiscard]] std::size_t num_classes() const noexcept { return num_classes_; }
  [[nodiscard]] std::size_t max_depth() const noexcept { return max_depth_; }
  [[nodiscard]] Seed seed() const noexcept { return seed_; }

  friend bool operator==(const BaggedTreesModel&, const BaggedTreesModel&) = default;

 private:
  std::vector<DecisionTree> trees_;
  std::size_t num_features_;
  std::size_t num_classes_;
  std::size_t max_depth_;
  Seed seed_;
};

/// Fits `num_trees` trees, tree t on a same-size bootstrap resample drawn
/// from the substream Rng::derive(seed, t).
BaggedTreesModel fit_bagged_trees(const Dataset& train, std::size_t num_trees,
                                  std::size_t max_depth, Seed seed);

inline BaggedTreesModel fit_bagged_trees(const Dataset& train, const TreeParams& params,
                                         Seed seed) {
  return fit_bagged_trees(train, params.num_trees, params.max_depth, seed);
}

/// Uniform-weight ensemble of the leaf distributions reached by `x`.
SecondOrderEnsemble predict_second_order(const BaggedTreesModel& model, std::span<const double> x);

/// predict_second_order for every row of `data`.
std::vector<SecondOrderEnsemble> predict_all(const BaggedTreesModel& model, const Dataset& data);

/// Fraction of rows whose model-average argmax differs from the label.
double zero_one_error(const BaggedTreesModel& model, const Dataset& data);

}  // namespace uqalign
