#include "uqalign/trees.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

#include "uqalign/rng.hpp"

namespace uqalign {
namespace {

struct Split {
  std::size_t feature = 0;
  double threshold = 0.0;
  // sum_k cL_k^2 / nL + sum_k cR_k^2 / nR; larger means lower weighted Gini.
  double purity = -std::numeric_limits<double>::infinity();
};

}  // namespace

class DecisionTree::Builder {
 public:
  Builder(const Dataset& data, std::size_t max_depth, DecisionTree& tree)
      : data_(data), max_depth_(max_depth), tree_(tree), k_(data.num_classes()) {}

  std::uint32_t grow(std::vector<std::size_t> rows, std::size_t depth) {
    tree_.depth_ = std::max(tree_.depth_, depth);
    const auto counts = class_counts(rows);
    const bool pure =
        std::count_if(counts.begin(), counts.end(), [](std::size_t c) { return c > 0; }) <= 1;
    if (depth >= max_depth_ || pure || rows.size() < 2) return make_leaf(counts, rows.size());

    const Split split = best_split(rows, counts);
    if (!std::isfinite(split.purity)) return make_leaf(counts, rows.size());

    std::vector<std::size_t> left;
    std::vector<std::size_t> right;
    for (std::size_t r : rows) {
      (data_.feature(r, split.feature) <= split.threshold ? left : right).push_back(r);
    }
    rows.clear();
    rows.shrink_to_fit();

    const auto id = static_cast<std::uint32_t>(tree_.nodes_.size());
    tree_.nodes_.push_back({split.feature, split.threshold, 0, 0, -1});
    const std::uint32_t l = grow(std::move(left), depth + 1);
    const std::uint32_t r = grow(std::move(right), depth + 1);
    tree_.nodes_[id].left = l;
    tree_.nodes_[id].right = r;
    return id;
  }

 private:
  std::vector<std::size_t> class_counts(const std::vector<std::size_t>& rows) const {
    std::vector<std::size_t> counts(k_, 0);
    for (std::size_t r : rows) ++counts[data_.label(r)];
    return counts;
  }

  std::uint32_t make_leaf(const std::vector<std::size_t>& counts, std::size_t n) {
    std::vector<double> probs(k_);
    const double denom = static_cast<double>(n + k_);
    for (std::size_t c = 0; c < k_; ++c) probs[c] = static_cast<double>(counts[c] + 1) / denom;
    const auto id = static_cast<std::uint32_t>(tree_.nodes_.size());
    tree_.nodes_.push_back({0, 0.0, 0, 0, static_cast<std::int32_t>(tree_.leaves_.size())});
    tree_.leaves_.emplace_back(std::move(probs));
    return id;
  }

  static double sum_sq(const std::vector<std::size_t>& counts) {
    double s = 0.0;
    for (std::size_t c : counts) s += static_cast<double>(c) * static_cast<double>(c);
    return s;
  }

  Split best_split(const std::vector<std::size_t>& rows,
                   const std::vector<std::size_t>& counts) const {
    const std::size_t n = rows.size();
    // A split must beat the unsplit node by more than rounding noise.
    const double parent = sum_sq(counts) / static_cast<double>(n);
    const double min_purity = parent + 1e-12 * std::max(1.0, parent);

    Split best;
    std::vector<std::size_t> order(rows);
    std::vector<std::size_t> left(k_);
    std::vector<std::size_t> right(k_);
    for (std::size_t f = 0; f < data_.num_features(); ++f) {
      std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return data_.feature(a, f) < data_.feature(b, f);
      });
      std::fill(left.begin(), left.end(), 0);
      right = counts;
      double sq_left = 0.0;
      double sq_right = sum_sq(counts);
      for (std::size_t i = 0; i + 1 < n; ++i) {
        const Label y = data_.label(order[i]);
        sq_left += 2.0 * static_cast<double>(left[y]) + 1.0;
        sq_right -= 2.0 * static_cast<double>(right[y]) - 1.0;
        ++left[y];
        --right[y];
        const double lo = data_.feature(order[i], f);
        const double hi = data_.feature(order[i + 1], f);
        if (!(lo < hi)) continue;
        const double n_left = static_cast<double>(i + 1);
        const double purity = sq_left / n_left + sq_right / (static_cast<double>(n) - n_left);
        if (purity > best.purity && purity > min_purity) {
          double mid = lo + (hi - lo) / 2.0;
          if (!(mid < hi)) mid = lo;
          best = {f, mid, purity};
        }
      }
    }
    return best;
  }

  const Dataset& data_;
  std::size_t max_depth_;
  DecisionTree& tree_;
  std::size_t k_;
};

DecisionTree DecisionTree::fit(const Dataset& data, std::span<const std::size_t> rows,
                               std::size_t max_depth) {
  if (rows.empty()) throw InvalidArgument("cannot fit a tree on zero rows");
  DecisionTree tree;
  Builder builder(data, max_depth, tree);
  const std::uint32_t root = builder.grow({rows.begin(), rows.end()}, 0);
  // grow() appends the root before its children, so it is always node 0.
  static_cast<void>(root);
  return tree;
}

const Categorical& DecisionTree::predict(std::span<const double> x) const {
  std::uint32_t id = 0;
  while (nodes_[id].leaf < 0) {
    const Node& node = nodes_[id];
    id = x[node.feature] <= node.threshold ? node.left : node.right;
  }
  return leaves_[static_cast<std::size_t>(nodes_[id].leaf)];
}

BaggedTreesModel::BaggedTreesModel(std::vector<DecisionTree> trees, std::size_t num_features,
                                   std::size_t num_classes, std::size_t max_depth, Seed seed)
    : trees_(std::move(trees)),
      num_features_(num_features),
      num_classes_(num_classes),
      max_depth_(max_depth),
      seed_(seed) {
  if (trees_.empty()) throw InvalidArgument("bagged model needs at least one tree");
}

BaggedTreesModel fit_bagged_trees(const Dataset& train, std::size_t num_trees,
                                  std::size_t max_depth, Seed seed) {
  if (train.empty()) throw InvalidArgument("cannot fit bagged trees on an empty dataset");
  if (num_trees == 0) throw InvalidArgument("bagged model needs at least one tree");
  const std::size_t n = train.size();
  std::vector<DecisionTree> trees;
  trees.reserve(num_trees);
  std::vector<std::size_t> sample(n);
  for (std::size_t t = 0; t < num_trees; ++t) {
    Rng rng(Rng::derive(seed, t));
    for (auto& s : sample) s = static_cast<std::size_t>(rng.below(n));
    trees.push_back(DecisionTree::fit(train, sample, max_depth));
  }
  return BaggedTreesModel(std::move(trees), train.num_features(), train.num_classes(), max_depth,
                          seed);
}

SecondOrderEnsemble predict_second_order(const BaggedTreesModel& model,
                                         std::span<const double> x) {
  if (x.size() != model.num_features()) {
    throw DimensionMismatch("feature vector has " + std::to_string(x.size()) +
                            " entries, model expects " + std::to_string(model.num_features()));
  }
  std::vector<Categorical> members;
  members.reserve(model.num_trees());
  for (const auto& tree : model.trees()) members.push_back(tree.predict(x));
  return SecondOrderEnsemble(std::move(members));
}

std::vector<SecondOrderEnsemble> predict_all(const BaggedTreesModel& model, const Dataset& data) {
  std::vector<SecondOrderEnsemble> out;
  out.reserve(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    out.push_back(predict_second_order(model, data.row(i)));
  }
  return out;
}

double zero_one_error(const BaggedTreesModel& model, const Dataset& data) {
  if (data.empty()) throw InvalidArgument("zero-one error of an empty dataset");
  std::size_t wrong = 0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto avg = model_average(predict_second_order(model, data.row(i)));
    if (avg.argmax() != data.label(i)) ++wrong;
  }
  return static_cast<double>(wrong) / static_cast<double>(data.size());
}

}  // namespace uqalign
