#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "srforge/model.hpp"
#include "srforge/optim.hpp"

namespace srforge {

struct FormatError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct TransferError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Model parameters, optimizer moments and progress, persisted together.
///
/// File layout (little-endian):
///   "SRFG" | u32 version | u32 length + JSON header (model config, step,
///   record count, per-parameter Adam step counts) | records...
/// where each record is u32 length + name | u8 rank | u32 dims[rank] | f32 data.
/// Parameter records come first in model order; Adam moments follow under the
/// names "<param>/m" and "<param>/v".
struct Checkpoint {
  static constexpr std::uint32_t kVersion = 1;

  std::uint32_t version = kVersion;
  ModelConfig config;
  std::vector<NamedParam> params;
  AdamState moments;
  std::int64_t step = 0;

  static Checkpoint capture(const Model& model, const AdamState& moments = {}, std::int64_t step = 0);
  /// Rebuilds the model and copies every parameter in.
  Model restore() const;
  const NamedParam* find(std::string_view name) const;
};

std::vector<std::uint8_t> serialize(const Checkpoint& ckpt);
Checkpoint deserialize(const std::vector<std::uint8_t>& bytes);

void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path);
Checkpoint load_checkpoint(const std::filesystem::path& path);

struct TransferReport {
  std::vector<std::string> copied;
  std::vector<std::string> skipped;
};

/// Copies every source parameter whose name and shape match the target. Requires
/// equal B and F; on mismatch throws TransferError before mutating anything.
TransferReport transfer_from(Model& target, const Checkpoint& source);

}  // namespace srforge
