#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "uqalign/core.hpp"

namespace uqalign {

/// Class-conditional axis-aligned Gaussians with symmetric label noise.
///
/// A sample draws its class from `class_priors`, features from
/// N(means[c], diag(scales[c]^2)), then with probability `label_flip`
/// replaces the label by a uniformly chosen other class.
struct MixtureSpec {
  std::size_t num_classes = 2;
  std::size_t num_features = 2;
  std::vector<std::vector<double>> means;   ///< K x D
  std::vector<std::vector<double>> scales;  ///< K x D, per-axis std
  std::vector<double> class_priors;         ///< K, empty means uniform
  double label_flip = 0.0;

  /// Throws InvalidArgument when dimensions or values are inconsistent.
  void validate() const;
  /// Mean of all per-class, per-axis scales.
  [[nodiscard]] double mean_scale() const;
};

/// `n` samples from `spec`; a pure function of its arguments.
Dataset gen_mixture(const MixtureSpec& spec, std::size_t n, Seed seed);

/// Like gen_mixture with every class mean translated by
/// shift * mean_scale() along the first feature axis. shift = 0 reproduces
/// gen_mixture exactly.
Dataset gen_ood_shift(const MixtureSpec& spec, double shift, std::size_t n, Seed seed);

/// Reads a delimited file with a header row. Non-label columns become
/// features in header order; label strings map to their index in the sorted
/// set of distinct labels. Throws DataError naming the row/column on
/// malformed input.
Dataset load_csv(const std::filesystem::path& path, const std::string& label_column,
                 char delimiter = ',');

/// Seeded shuffle; the first floor(train_fraction * N) rows become the train
/// set. Throws InvalidArgument when either side would be empty.
std::pair<Dataset, Dataset> split(const Dataset& data, double train_fraction, Seed seed);

/// Built-in synthetic tasks.
namespace presets {

/// Three overlapping 2D classes of unequal spread (scales 1.5, 0.6, 1.0)
/// with 5% label noise. Default for selective prediction.
MixtureSpec selective_default();

/// Two noisy 2D classes (20% flips) separated along axis 1 only. Axis 0
/// carries no class signal, so a shift along it leaves the training
/// support without changing the class structure. Used for OoD detection.
MixtureSpec ood_default();

/// Two cleanly separated bulk classes (47% each) plus two tight rare
/// clusters (3% each) off to the sides, no label noise. Most residual error
/// sits in the rare clusters, which random sampling rarely hits. Used for
/// active learning.
MixtureSpec rare_regions();

/// K = 2 classes with well-separated means and the given label flip rate;
/// its Bayes zero-one risk equals `label_flip`.
MixtureSpec separated(double label_flip);

}  // namespace presets

}  // namespace uqalign
