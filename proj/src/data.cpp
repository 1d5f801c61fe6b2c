#include "uqalign/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include "uqalign/rng.hpp"

namespace uqalign {

void MixtureSpec::validate() const {
  if (num_classes < 2) throw InvalidArgument("mixture needs at least 2 classes");
  if (num_features < 1) throw InvalidArgument("mixture needs at least 1 feature");
  if (means.size() != num_classes || scales.size() != num_classes) {
    throw InvalidArgument("mixture means/scales must have one row per class");
  }
  for (std::size_t c = 0; c < num_classes; ++c) {
    if (means[c].size() != num_features || scales[c].size() != num_features) {
      throw InvalidArgument("mixture means/scales rows must have one entry per feature");
    }
    for (std::size_t d = 0; d < num_features; ++d) {
      if (!std::isfinite(means[c][d])) throw InvalidArgument("mixture means must be finite");
      if (!(scales[c][d] > 0.0) || !std::isfinite(scales[c][d])) {
        throw InvalidArgument("mixture scales must be positive");
      }
    }
  }
  if (!class_priors.empty()) {
    if (class_priors.size() != num_classes) {
      throw InvalidArgument("class priors must have one entry per class");
    }
    validate_simplex(class_priors);
  }
  if (!(label_flip >= 0.0 && label_flip < 1.0)) {
    throw InvalidArgument("label_flip must lie in [0, 1)");
  }
}

double MixtureSpec::mean_scale() const {
  double total = 0.0;
  for (const auto& row : scales) total = std::accumulate(row.begin(), row.end(), total);
  return total / static_cast<double>(num_classes * num_features);
}

namespace {

Dataset sample_mixture(const MixtureSpec& spec, double axis0_offset, std::size_t n, Seed seed,
                       std::string source) {
  spec.validate();
  if (n == 0) throw InvalidArgument("sample count must be >= 1");
  const std::size_t k = spec.num_classes;
  const std::size_t d = spec.num_features;
  const std::vector<double> priors =
      spec.class_priors.empty() ? std::vector<double>(k, 1.0 / static_cast<double>(k))
                                : spec.class_priors;

  Rng rng(seed);
  std::vector<double> features(n * d);
  std::vector<Label> labels(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t c = rng.categorical(priors);
    for (std::size_t j = 0; j < d; ++j) {
      const double mean = spec.means[c][j] + (j == 0 ? axis0_offset : 0.0);
      features[i * d + j] = mean + spec.scales[c][j] * rng.normal();
    }
    Label y = c;
    if (rng.uniform() < spec.label_flip) {
      y = static_cast<Label>(rng.below(k - 1));
      if (y >= c) ++y;
    }
    labels[i] = y;
  }
  return Dataset(d, k, std::move(features), std::move(labels), std::move(source));
}

std::string describe(const char* kind, std::size_t n, Seed seed) {
  std::ostringstream os;
  os << kind << "(n=" << n << ", seed=" << seed.value << ")";
  return os.str();
}

std::vector<std::string> split_line(const std::string& line, char delimiter) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, delimiter)) cells.push_back(cell);
  if (!line.empty() && line.back() == delimiter) cells.emplace_back();
  for (auto& c : cells) {
    const auto first = c.find_first_not_of(" \t\r");
    const auto last = c.find_last_not_of(" \t\r");
    c = first == std::string::npos ? std::string() : c.substr(first, last - first + 1);
  }
  return cells;
}

}  // namespace

Dataset gen_mixture(const MixtureSpec& spec, std::size_t n, Seed seed) {
  return sample_mixture(spec, 0.0, n, seed, describe("mixture", n, seed));
}

Dataset gen_ood_shift(const MixtureSpec& spec, double shift, std::size_t n, Seed seed) {
  if (!(shift >= 0.0) || !std::isfinite(shift)) throw InvalidArgument("shift must be >= 0");
  spec.validate();
  if (shift == 0.0) return gen_mixture(spec, n, seed);
  std::ostringstream kind;
  kind << "mixture_shift" << shift;
  return sample_mixture(spec, shift * spec.mean_scale(), n, seed,
                        describe(kind.str().c_str(), n, seed));
}

Dataset load_csv(const std::filesystem::path& path, const std::string& label_column,
                 char delimiter) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path.string() + "'");

  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    header = split_line(line, delimiter);
    break;
  }
  if (header.empty()) throw DataError("'" + path.string() + "' is empty");

  const auto label_it = std::find(header.begin(), header.end(), label_column);
  if (label_it == header.end()) {
    throw DataError("label column '" + label_column + "' not found in header of '" +
                    path.string() + "'");
  }
  const auto label_idx = static_cast<std::size_t>(label_it - header.begin());
  const std::size_t num_features = header.size() - 1;
  if (num_features == 0) throw DataError("'" + path.string() + "' has no feature columns");

  std::vector<double> features;
  std::vector<std::string> raw_labels;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto cells = split_line(line, delimiter);
    if (cells.size() != header.size()) {
      throw DataError("row " + std::to_string(line_no) + ": expected " +
                      std::to_string(header.size()) + " columns, found " +
                      std::to_string(cells.size()));
    }
    for (std::size_t c = 0; c < cells.size(); ++c) {
      if (c == label_idx) {
        if (cells[c].empty()) {
          throw DataError("row " + std::to_string(line_no) + ", column '" + header[c] +
                          "': empty label");
        }
        raw_labels.push_back(cells[c]);
        continue;
      }
      double value = 0.0;
      const char* begin = cells[c].data();
      const char* end = begin + cells[c].size();
      const auto [ptr, ec] = std::from_chars(begin, end, value);
      if (ec != std::errc() || ptr != end || cells[c].empty() || !std::isfinite(value)) {
        throw DataError("row " + std::to_string(line_no) + ", column '" + header[c] +
                        "': non-numeric value '" + cells[c] + "'");
      }
      features.push_back(value);
    }
  }
  if (raw_labels.empty()) throw DataError("'" + path.string() + "' has no data rows");

  const std::set<std::string> distinct(raw_labels.begin(), raw_labels.end());
  std::map<std::string, Label> index;
  for (const auto& name : distinct) index.emplace(name, index.size());
  std::vector<Label> labels;
  labels.reserve(raw_labels.size());
  for (const auto& name : raw_labels) labels.push_back(index.at(name));

  // A single observed class still yields a valid two-class problem.
  const std::size_t k = std::max<std::size_t>(2, distinct.size());
  return Dataset(num_features, k, std::move(features), std::move(labels),
                 "csv:" + path.string());
}

std::pair<Dataset, Dataset> split(const Dataset& data, double train_fraction, Seed seed) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw InvalidArgument("train fraction must lie in (0, 1)");
  }
  const std::size_t n = data.size();
  const auto n_train =
      static_cast<std::size_t>(std::floor(train_fraction * static_cast<double>(n)));
  if (n_train == 0) throw InvalidArgument("empty train split");
  if (n_train == n) throw InvalidArgument("empty test split");
  const auto perm = Rng(seed).permutation(n);
  const std::span<const std::size_t> all(perm);
  return {data.subset(all.first(n_train)), data.subset(all.subspan(n_train))};
}

}  // namespace uqalign

namespace uqalign::presets {
namespace {

MixtureSpec isotropic(std::vector<std::vector<double>> means, double scale,
                      std::vector<double> priors, double label_flip) {
  MixtureSpec spec;
  spec.num_classes = means.size();
  spec.num_features = means.front().size();
  spec.scales.assign(spec.num_classes, std::vector<double>(spec.num_features, scale));
  spec.means = std::move(means);
  spec.class_priors = std::move(priors);
  spec.label_flip = label_flip;
  return spec;
}

}  // namespace

MixtureSpec selective_default() {
  MixtureSpec spec = isotropic({{0.0, 0.0}, {1.5, 0.0}, {0.75, 1.3}}, 1.0, {}, 0.05);
  spec.scales = {{1.5, 1.5}, {0.6, 0.6}, {1.0, 1.0}};
  return spec;
}

MixtureSpec ood_default() { return isotropic({{0.0, 0.0}, {0.0, 6.0}}, 1.0, {}, 0.2); }

MixtureSpec rare_regions() {
  MixtureSpec spec = isotropic({{0.0, 0.0}, {6.0, 0.0}, {3.0, 5.0}, {3.0, -5.0}}, 1.0,
                               {0.47, 0.47, 0.03, 0.03}, 0.0);
  spec.scales[2] = {0.5, 0.5};
  spec.scales[3] = {0.5, 0.5};
  return spec;
}

MixtureSpec separated(double label_flip) {
  return isotropic({{-4.0, 0.0}, {4.0, 0.0}}, 1.0, {}, label_flip);
}

}  // namespace uqalign::presets
