#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "srforge/image.hpp"
#include "srforge/trainer.hpp"

namespace srforge {

/// HR images are cropped to multiples of this so x2, x3 and x4 all divide them.
inline constexpr int kHrCropMultiple = 12;

struct ManifestEntry {
  std::string name;
  std::filesystem::path hr;             // relative to the manifest directory
  std::map<int, std::filesystem::path> lr;
  std::string split = "train";
};

struct Manifest {
  std::string dataset;
  std::vector<int> scales;
  std::array<float, 3> rgb_mean{0.0f, 0.0f, 0.0f};
  std::vector<ManifestEntry> entries;
  /// Directory the relative paths resolve against; not serialized.
  std::filesystem::path root;
};

struct PrepareOptions {
  std::string dataset = "dataset";
  std::vector<int> scales{2, 3, 4};
  /// Image names (file stems) tagged "val" instead of "train".
  std::set<std::string> val_names;
};

struct PrepareResult {
  Manifest manifest;
  std::vector<std::string> skipped;  // "<file>: <reason>"
};

/// Crops each HR PNG in `hr_dir` to multiples of 12, writes it and its
/// antialiased bicubic LR versions under `out_dir`, computes the per-channel
/// mean over the training split and writes `out_dir/manifest.json`.
PrepareResult prepare_dataset(const std::filesystem::path& hr_dir, const std::filesystem::path& out_dir,
                              const PrepareOptions& options);

/// Per-channel mean over every pixel of the given images.
std::array<float, 3> compute_rgb_mean(const std::vector<Image>& images);

void save_manifest(const Manifest& m, const std::filesystem::path& path);
Manifest load_manifest(const std::filesystem::path& path);

/// Loads the LR/HR pairs of one split for the requested scales.
TrainingSet load_training_set(const Manifest& m, const std::vector<int>& scales,
                              const std::string& split = "train");

}  // namespace srforge
