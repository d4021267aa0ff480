#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "msmsf/edge_eval.hpp"
#include "msmsf/model.hpp"
#include "msmsf/trainer.hpp"

namespace msmsf {

enum class Split { train, val, test };
Split parse_split(const std::string& name);
std::string to_string(Split split);

struct ManifestEntry {
  std::filesystem::path image;
  std::vector<std::filesystem::path> annotations;
  std::string modality = "rgb";

  /// File name of the image without extension; pairs predictions with GT.
  std::string stem() const { return image.stem().string(); }
};

struct DatasetManifest {
  std::string name;
  Split split = Split::train;
  std::vector<ManifestEntry> entries;
  std::string augmentation = "identity";

  /// Distinct modality tags in entry order.
  std::vector<std::string> modalities() const;
};

/// Parses a JSON manifest. A relative manifest path resolves against `root`;
/// entry paths resolve against the manifest's directory and are stored
/// resolved. A missing manifest file raises ConfigError; a missing
/// referenced file raises DataError naming it.
DatasetManifest load_manifest(const std::filesystem::path& path, const std::filesystem::path& root);
/// Entry paths are written relative to `base`.
std::string manifest_to_json(const DatasetManifest& manifest, const std::filesystem::path& base);

struct EvalSettings {
  std::optional<double> tol_frac;  // unset -> dataset default
  std::vector<double> thresholds;  // empty -> k/100
  bool multiscale = false;
  std::vector<double> scales{0.5, 1.0, 1.5};
  bool nms = true;

  /// 0.011 for nyud, 0.0075 otherwise, unless tol_frac is set.
  double tolerance(DatasetProfile dataset) const;
};

struct RunConfig {
  // "tiny", "paper-depth", or a path to a JSON net description.
  std::string net_profile = "tiny";
  MsmsfNetConfig net = MsmsfNetConfig::tiny();
  DatasetProfile dataset = DatasetProfile::biped;
  TrainConfig train;
  EvalSettings eval;
  std::filesystem::path manifest;
  std::filesystem::path output_dir = "runs/out";
  std::uint64_t seed = 0;
  std::vector<float> mean;  // empty -> no mean subtraction
  // train.augment was given explicitly; otherwise the manifest's policy applies.
  bool augment_explicit = false;
  // Write epoch_NNN.ckpt after every n-th epoch; final.ckpt is always written.
  std::size_t checkpoint_every = 1;
};

/// Loads a run config. Unset training fields take the dataset profile's
/// defaults; train.seed always equals seed.
RunConfig load_run_config(const std::filesystem::path& path, const std::filesystem::path& root);
RunConfig parse_run_config(const std::string& json_text, const std::filesystem::path& root);

/// Fully resolved config as stable, pretty-printed JSON.
std::string run_config_to_json(const RunConfig& config);

/// Net description in JSON: {"in_channels", "stages": [{"blocks", "width"}],
/// "block": {"branches": [[[kh, kw], ...] x4], "pairs", "pair_fusion",
/// "output_fusion"}, "pool_after", "side_stages", "side_kernel",
/// "fusion_kernel"}.
MsmsfNetConfig parse_net_config(const std::string& json_text);
std::string net_config_to_json(const MsmsfNetConfig& config);
/// Profile name or path (relative to root).
MsmsfNetConfig resolve_net_profile(const std::string& name_or_path, const std::filesystem::path& root);

}  // namespace msmsf
