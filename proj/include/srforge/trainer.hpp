#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "srforge/checkpoint.hpp"
#include "srforge/geometry.hpp"
#include "srforge/model.hpp"
#include "srforge/optim.hpp"

namespace srforge {

enum class LossKind { l1, l2 };

struct TrainConfig {
  LossKind loss = LossKind::l1;
  double lr0 = 1e-4;
  std::int64_t halve_every = 200000;
  int batch = 16;
  int patch_lr = 48;
  AdamHyper adam{};
  std::int64_t max_updates = 1000;
  std::uint64_t seed = 0;
  /// Scales drawn from by multi-scale training.
  std::vector<int> scales{2, 3, 4};
  std::int64_t checkpoint_every = 1000;

  void validate() const;
  bool operator==(const TrainConfig&) const = default;
};

/// lr0 * 2^-floor(step / halve_every).
double lr_at(std::int64_t step, const TrainConfig& cfg);

/// Aligned LR/HR pair in the 0-255 float domain; hr is `scale` times larger than lr.
struct ImagePair {
  std::string name;
  Tensor lr;
  Tensor hr;
};

struct TrainingSet {
  std::map<int, std::vector<ImagePair>> by_scale;
  /// Names already reported as too small for the patch size.
  mutable std::set<std::string> warned;

  const std::vector<ImagePair>& pairs(int scale) const;
};

struct Batch {
  Tensor lr;  // (batch, 3, patch, patch)
  Tensor hr;  // (batch, 3, patch * scale, patch * scale)
  int scale = 0;
  struct Origin {
    std::size_t image = 0;
    int x = 0;  // LR pixel offsets
    int y = 0;
    GeomTransform transform;
  };
  std::vector<Origin> origins;
};

/// Cuts `cfg.batch` LR patches on integer LR offsets with their HR counterparts at
/// offset * scale; each pair gets one uniformly drawn dihedral transform.
Batch sample_batch(const TrainingSet& set, int scale, const TrainConfig& cfg, std::mt19937_64& rng);

/// Generator for update `step`; depends only on (seed, step) so a resumed run
/// sees the same batches as an uninterrupted one.
std::mt19937_64 step_rng(std::uint64_t seed, std::int64_t step);

struct LossRecord {
  std::int64_t step = 0;  // updates completed, 1-based
  int scale = 0;
  double lr = 0.0;
  double loss = 0.0;
};

std::string format_loss_record(const LossRecord& r);

struct TrainOptions {
  /// When set, checkpoints ("ckpt_<step>.srfg") and "loss.log" are written here.
  std::filesystem::path run_dir;
  std::function<void(const LossRecord&, const std::vector<std::string>& updated)> on_update;
};

struct TrainResult {
  Checkpoint checkpoint;
  std::vector<LossRecord> curve;
};

/// Single-scale loop: sample -> forward -> loss -> backward -> Adam, for
/// cfg.max_updates updates in total (counting those already in `resume`).
TrainResult train_single(Model& model, const TrainingSet& set, const TrainConfig& cfg,
                         const Checkpoint* resume = nullptr, const TrainOptions& options = {});

/// Multi-scale loop: each update draws one scale uniformly from cfg.scales and
/// touches only the shared parameters and that scale's branch.
TrainResult train_multi(Model& model, const TrainingSet& set, const TrainConfig& cfg,
                        const Checkpoint* resume = nullptr, const TrainOptions& options = {});

}  // namespace srforge
