#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace uqalign {

/// Base for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition of an operation was violated by its arguments.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

/// The operation is not defined for the given object (e.g. a potential of a
/// rule that is only proper, not strictly proper).
class UnsupportedOperation : public Error {
 public:
  using Error::Error;
};

/// Malformed external data (CSV/JSON files).
class DataError : public Error {
 public:
  using Error::Error;
};

/// Malformed experiment configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

inline constexpr double kSimplexTolerance = 1e-9;

using Label = std::size_t;

struct Seed {
  std::uint64_t value = 0;

  friend bool operator==(Seed, Seed) = default;
};

/// A first-order distribution: a probability vector over K >= 2 classes.
///
/// Construction validates the simplex invariants (entries in [0, 1], sum
/// within 1e-9 of one); a constructed Categorical is immutable.
class Categorical {
 public:
  explicit Categorical(std::vector<double> probs);

  [[nodiscard]] std::size_t size() const noexcept { return probs_.size(); }
  [[nodiscard]] double operator[](std::size_t k) const noexcept { return probs_[k]; }
  [[nodiscard]] std::span<const double> probs() const noexcept { return probs_; }

  /// Index of the largest entry; ties go to the lowest index.
  [[nodiscard]] std::size_t argmax() const noexcept;
  [[nodiscard]] double max() const noexcept { return probs_[argmax()]; }

  static Categorical uniform(std::size_t k);
  static Categorical point_mass(std::size_t k, std::size_t at);

  friend bool operator==(const Categorical&, const Categorical&) = default;

 private:
  std::vector<double> probs_;
};

/// Accepts `v` as a distribution if it is within `tol` of the simplex,
/// renormalising small deviations of the sum. Throws InvalidArgument
/// ("not a distribution") otherwise.
Categorical validate_simplex(std::span<const double> v, double tol = kSimplexTolerance);

/// A finite second-order distribution: M weighted first-order members.
class SecondOrderEnsemble {
 public:
  /// Uniform weights 1/M.
  explicit SecondOrderEnsemble(std::vector<Categorical> members);
  SecondOrderEnsemble(std::vector<Categorical> members, std::vector<double> weights);

  [[nodiscard]] std::size_t size() const noexcept { return members_.size(); }
  [[nodiscard]] std::size_t num_classes() const noexcept { return members_.front().size(); }
  [[nodiscard]] const std::vector<Categorical>& members() const noexcept { return members_; }
  [[nodiscard]] const std::vector<double>& weights() const noexcept { return weights_; }
  [[nodiscard]] const Categorical& operator[](std::size_t m) const noexcept { return members_[m]; }
  [[nodiscard]] double weight(std::size_t m) const noexcept { return weights_[m]; }

 private:
  std::vector<Categorical> members_;
  std::vector<double> weights_;
};

/// Bayesian model average: the weighted mean of the ensemble members.
Categorical model_average(const SecondOrderEnsemble& q);

/// Dense row-major feature matrix with integer labels in {0..K-1}.
class Dataset {
 public:
  Dataset() = default;
  Dataset(std::size_t num_features, std::size_t num_classes, std::vector<double> features,
          std::vector<Label> labels, std::string source);

  [[nodiscard]] std::size_t size() const noexcept { return labels_.size(); }
  [[nodiscard]] bool empty() const noexcept { return labels_.empty(); }
  [[nodiscard]] std::size_t num_features() const noexcept { return num_features_; }
  [[nodiscard]] std::size_t num_classes() const noexcept { return num_classes_; }
  [[nodiscard]] const std::string& source() const noexcept { return source_; }

  [[nodiscard]] std::span<const double> row(std::size_t i) const noexcept {
    return {features_.data() + i * num_features_, num_features_};
  }
  [[nodiscard]] double feature(std::size_t i, std::size_t j) const noexcept {
    return features_[i * num_features_ + j];
  }
  [[nodiscard]] Label label(std::size_t i) const noexcept { return labels_[i]; }
  [[nodiscard]] const std::vector<Label>& labels() const noexcept { return labels_; }
  [[nodiscard]] const std::vector<double>& features() const noexcept { return features_; }

  /// Rows at `indices`, in that order.
  [[nodiscard]] Dataset subset(std::span<const std::size_t> indices) const;

  friend bool operator==(const Dataset&, const Dataset&) = default;

 private:
  std::size_t num_features_ = 0;
  std::size_t num_classes_ = 0;
  std::vector<double> features_;
  std::vector<Label> labels_;
  std::string source_;
};

}  // namespace uqalign
