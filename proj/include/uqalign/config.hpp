#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "uqalign/core.hpp"
#include "uqalign/data.hpp"
#include "uqalign/experiments.hpp"

namespace uqalign::config {

using Json = nlohmann::json;

/// Parses a JSON file. A missing or malformed file raises `Err`.
template <typename Err = ConfigError>
Json load_json(const std::filesystem::path& path);

/// Object keys not in `allowed` raise ConfigError naming `where`.
void check_keys(const Json& object, std::initializer_list<const char*> allowed,
                const std::string& where);

/// {"num_classes", "num_features", "means", "scales" | "scale",
///  "class_priors", "label_flip"}. `scale` broadcasts one std to every
/// class and axis. Missing counts are inferred from `means`.
MixtureSpec mixture_from_json(const Json& j);
Json to_json(const MixtureSpec& spec);

/// Three accepted shapes:
///   [[p, ...], ...]                  one ensemble of probability vectors
///   [[[p, ...], ...], ...]           several ensembles
///   {"ensembles": [...], "weights": [[w, ...], ...]}   optional weights
/// Violations raise DataError.
std::vector<SecondOrderEnsemble> ensembles_from_json(const Json& j);

/// Common run-level options that may also come from a config file.
struct RunOptions {
  std::vector<Seed> seeds;
  std::optional<std::filesystem::path> output;
  std::optional<std::string> format;
};

/// Each `apply_*` reads the keys it knows from a config object into the
/// settings, leaving absent keys untouched, and rejects unknown keys.
void apply_selective(const Json& j, experiments::SelectiveSettings& s, RunOptions& run);
void apply_ood(const Json& j, experiments::OodSettings& s, RunOptions& run);
void apply_active(const Json& j, experiments::ActiveSettings& s, RunOptions& run);
void apply_dial(const Json& j, experiments::DialSettings& s, RunOptions& run);

Json to_json(const experiments::DataSource& source);
Json to_json(const TreeParams& trees);

}  // namespace uqalign::config
