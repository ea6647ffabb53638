#include "srforge/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>

#include "srforge/ops.hpp"

namespace srforge {

void TrainConfig::validate() const {
  if (!(lr0 > 0.0)) throw ConfigError("lr0: must be positive");
  if (halve_every < 1) throw ConfigError("halve_every: must be positive");
  if (batch < 1) throw ConfigError("batch: must be positive");
  if (patch_lr < 1) throw ConfigError("patch_lr: must be positive");
  if (!(adam.beta1 >= 0.0 && adam.beta1 < 1.0)) throw ConfigError("beta1: must lie in [0, 1)");
  if (!(adam.beta2 >= 0.0 && adam.beta2 < 1.0)) throw ConfigError("beta2: must lie in [0, 1)");
  if (!(adam.eps > 0.0)) throw ConfigError("eps: must be positive");
  if (max_updates < 0) throw ConfigError("max_updates: must be non-negative");
  if (checkpoint_every < 1) throw ConfigError("checkpoint_every: must be positive");
  if (scales.empty()) throw ConfigError("scales: must not be empty");
  for (int s : scales) {
    if (s < 2 || s > 4) throw ConfigError("scales: unsupported scale " + std::to_string(s));
  }
}

double lr_at(std::int64_t step, const TrainConfig& cfg) {
  if (step < 0) throw UsageError("lr_at: negative step");
  return std::ldexp(cfg.lr0, -static_cast<int>(std::min<std::int64_t>(step / cfg.halve_every, 2000)));
}

const std::vector<ImagePair>& TrainingSet::pairs(int scale) const {
  auto it = by_scale.find(scale);
  if (it == by_scale.end() || it->second.empty()) {
    throw ConfigError("training set has no images for scale x" + std::to_string(scale));
  }
  return it->second;
}

std::mt19937_64 step_rng(std::uint64_t seed, std::int64_t step) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(step), static_cast<std::uint32_t>(step >> 32)};
  return std::mt19937_64(seq);
}

namespace {

Tensor crop_tensor(const Tensor& src, std::int64_t y0, std::int64_t x0, std::int64_t h, std::int64_t w) {
  const Shape s = src.shape();
  Tensor out({1, s.c, h, w});
  for (std::int64_t c = 0; c < s.c; ++c) {
    for (std::int64_t y = 0; y < h; ++y) {
      const float* row = src.data().data() + src.offset(0, c, y0 + y, x0);
      std::copy(row, row + w, out.data().data() + out.offset(0, c, y, 0));
    }
  }
  return out;
}

}  // namespace

Batch sample_batch(const TrainingSet& set, int scale, const TrainConfig& cfg, std::mt19937_64& rng) {
  const auto& pairs = set.pairs(scale);
  const std::int64_t p = cfg.patch_lr;
  std::vector<std::size_t> eligible;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const Shape lr = pairs[i].lr.shape();
    const Shape hr = pairs[i].hr.shape();
    if (hr.h != lr.h * scale || hr.w != lr.w * scale) {
      throw ConfigError(pairs[i].name + ": HR is not exactly x" + std::to_string(scale) + " the LR size");
    }
    if (lr.h >= p && lr.w >= p) {
      eligible.push_back(i);
    } else if (set.warned.insert(pairs[i].name).second) {
      std::cerr << "warning: skipping " << pairs[i].name << " (LR " << lr.w << "x" << lr.h
                << " is smaller than the " << p << "px patch)\n";
    }
  }
  if (eligible.empty()) {
    throw ConfigError("no training image at x" + std::to_string(scale) + " is large enough for a " +
                      std::to_string(p) + "px LR patch");
  }

  Batch batch;
  batch.scale = scale;
  std::vector<Tensor> lrs, hrs;
  std::uniform_int_distribution<std::size_t> pick(0, eligible.size() - 1);
  std::uniform_int_distribution<int> pick_transform(0, 7);
  for (int i = 0; i < cfg.batch; ++i) {
    const std::size_t idx = eligible[pick(rng)];
    const ImagePair& pair = pairs[idx];
    const Shape lr = pair.lr.shape();
    std::uniform_int_distribution<std::int64_t> pick_y(0, lr.h - p);
    std::uniform_int_distribution<std::int64_t> pick_x(0, lr.w - p);
    const std::int64_t y = pick_y(rng);
    const std::int64_t x = pick_x(rng);
    const GeomTransform t = GeomTransform::from_index(pick_transform(rng));
    lrs.push_back(t.apply(crop_tensor(pair.lr, y, x, p, p)));
    hrs.push_back(t.apply(crop_tensor(pair.hr, y * scale, x * scale, p * scale, p * scale)));
    batch.origins.push_back({idx, static_cast<int>(x), static_cast<int>(y), t});
  }
  batch.lr = stack(lrs);
  batch.hr = stack(hrs);
  return batch;
}

std::string format_loss_record(const LossRecord& r) {
  char buf[128];
  std::snprintf(buf, sizeof buf, "%lld\t%d\t%.9g\t%.9g", static_cast<long long>(r.step), r.scale, r.lr, r.loss);
  return buf;
}

namespace {

std::string batch_stats(const Batch& b) {
  auto stats = [](const Tensor& t) {
    double lo = std::numeric_limits<double>::infinity(), hi = -lo, sum = 0.0;
    for (float v : t.data()) {
      lo = std::min<double>(lo, v);
      hi = std::max<double>(hi, v);
      sum += v;
    }
    char buf[128];
    std::snprintf(buf, sizeof buf, "min=%g max=%g mean=%g", lo, hi, sum / std::max<double>(1.0, double(t.numel())));
    return std::string(buf);
  };
  return "LR " + stats(b.lr) + "; HR " + stats(b.hr);
}

std::filesystem::path checkpoint_path(const std::filesystem::path& dir, std::int64_t step) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "ckpt_%08lld.srfg", static_cast<long long>(step));
  return dir / buf;
}

TrainResult run_training(Model& model, const TrainingSet& set, const TrainConfig& cfg,
                         const Checkpoint* resume, const TrainOptions& options, bool multi) {
  cfg.validate();
  const ModelConfig& mc = model.config();
  if (multi != (mc.kind == ModelKind::multi)) {
    throw ConfigError(multi ? "train_multi needs a multi-scale model" : "train_single needs a single-scale model");
  }
  if (multi) {
    for (int s : cfg.scales) {
      if (!mc.supports(s)) throw ConfigError("scales: model does not serve x" + std::to_string(s));
    }
  }

  AdamState state;
  std::int64_t start = 0;
  if (resume) {
    if (!(resume->config == mc)) throw ConfigError("resume checkpoint was written for a different model config");
    Model restored = resume->restore();
    for (auto& p : model.parameters()) p.value = restored.parameter(p.name).value;
    state = resume->moments;
    start = resume->step;
  }

  std::ofstream log;
  if (!options.run_dir.empty()) {
    std::filesystem::create_directories(options.run_dir);
    log.open(options.run_dir / "loss.log", resume ? std::ios::app : std::ios::trunc);
    if (!log) throw ConfigError("cannot open loss log in " + options.run_dir.string());
  }

  TrainResult result;
  for (std::int64_t k = start; k < cfg.max_updates; ++k) {
    std::mt19937_64 rng = step_rng(cfg.seed, k);
    int scale = mc.scales.front();
    if (multi) {
      std::uniform_int_distribution<std::size_t> pick(0, cfg.scales.size() - 1);
      scale = cfg.scales[pick(rng)];
    }
    const Batch batch = sample_batch(set, scale, cfg, rng);

    Tape tape;
    const Var input = tape.constant(batch.lr);
    const Var target = tape.constant(batch.hr);
    const Var output = model.forward(tape, input, scale);
    const Var loss = cfg.loss == LossKind::l1 ? l1_loss(tape, output, target) : l2_loss(tape, output, target);
    const double value = tape.scalar(loss);
    if (!std::isfinite(value)) {
      throw TrainingError("non-finite loss at update " + std::to_string(k + 1) + " (x" + std::to_string(scale) +
                          "): " + batch_stats(batch));
    }
    tape.backward(loss);
    const double lr = lr_at(k, cfg);
    const auto updated = adam_step(model, tape.parameter_gradients(), state, cfg.adam, lr);

    const LossRecord rec{k + 1, scale, lr, value};
    result.curve.push_back(rec);
    if (log.is_open()) log << format_loss_record(rec) << '\n';
    if (options.on_update) options.on_update(rec, updated);
    if (!options.run_dir.empty() && (k + 1) % cfg.checkpoint_every == 0 && k + 1 != cfg.max_updates) {
      log.flush();
      save_checkpoint(Checkpoint::capture(model, state, k + 1), checkpoint_path(options.run_dir, k + 1));
    }
  }
  const std::int64_t done = std::max(start, cfg.max_updates);
  result.checkpoint = Checkpoint::capture(model, state, done);
  if (!options.run_dir.empty()) {
    log.flush();
    save_checkpoint(result.checkpoint, checkpoint_path(options.run_dir, done));
  }
  return result;
}

}  // namespace

TrainResult train_single(Model& model, const TrainingSet& set, const TrainConfig& cfg,
                         const Checkpoint* resume, const TrainOptions& options) {
  return run_training(model, set, cfg, resume, options, false);
}

TrainResult train_multi(Model& model, const TrainingSet& set, const TrainConfig& cfg,
                        const Checkpoint* resume, const TrainOptions& options) {
  return run_training(model, set, cfg, resume, options, true);
}

}  // namespace srforge
