// Acceptance suite: one PASS/FAIL line per criterion. `--only N` runs a single criterion.
#include <CLI11.hpp>

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <deque>
#include <fstream>
#include <functional>
#include <map>
#include <numeric>
#include <optional>
#include <random>
#include <sstream>
#include <utility>

#include "srforge/checkpoint.hpp"
#include "srforge/ensemble.hpp"
#include "srforge/evaluation.hpp"
#include "srforge/gradcheck.hpp"
#include "srforge/manifest.hpp"
#include "srforge/metrics.hpp"
#include "srforge/resize.hpp"
#include "synthetic.hpp"

using namespace srforge;
using srforge::testing::random_tensor;
using srforge::testing::scratch_dir;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// ---------------------------------------------------------------- 1

Outcome param_counts() {
  struct Case {
    const char* name;
    ModelConfig cfg;
    double lo, hi;
  };
  const Case cases[] = {{"edsr B32 F256 x4", ModelConfig::edsr(32, 256, 4), 40.8e6, 45.2e6},
                        {"mdsr B80 F64", ModelConfig::mdsr(80, 64), 7.6e6, 8.4e6},
                        {"baseline single B16 F64 x2", ModelConfig::edsr(16, 64, 2), 1.3e6, 1.7e6},
                        {"baseline multi B16 F64", ModelConfig::mdsr(16, 64), 2.9e6, 3.5e6}};
  Outcome out{true, ""};
  for (const auto& c : cases) {
    const auto n = param_count(build_model(c.cfg));
    const bool ok = n >= c.lo && n <= c.hi;
    out.pass = out.pass && ok;
    out.detail += fmt("%s%s=%lld%s", out.detail.empty() ? "" : "; ", c.name, static_cast<long long>(n), ok ? "" : " (out of range)");
  }
  return out;
}

// ---------------------------------------------------------------- 2

constexpr double kSet5Psnr[] = {33.66, 30.39, 28.42};
constexpr double kSet5Ssim[] = {0.9299, 0.8682, 0.8104};
constexpr double kPsnrTol = 0.05;
constexpr double kSsimTol = 0.001;

std::optional<fs::path> find_set5() {
  std::vector<fs::path> candidates;
  if (const char* env = std::getenv("SRFORGE_SET5_DIR")) candidates.emplace_back(env);
  candidates.push_back(fs::path(SRFORGE_SOURCE_DIR) / "data" / "Set5");
  candidates.push_back(fs::path(SRFORGE_SOURCE_DIR) / "data" / "Set5" / "HR");
  for (const auto& c : candidates) {
    if (!fs::is_directory(c)) continue;
    std::size_t pngs = 0;
    for (const auto& e : fs::directory_iterator(c)) pngs += e.path().extension() == ".png";
    if (pngs == 5) return c;
  }
  return std::nullopt;
}

Outcome bicubic_baselines() {
  const auto dir = find_set5();
  if (!dir) {
    return {false, "Set5 HR images not found (set SRFORGE_SET5_DIR or place the 5 PNGs in data/Set5); "
                   "expected 33.66/0.9299, 30.39/0.8682, 28.42/0.8104"};
  }
  std::vector<std::pair<std::string, Image>> hr;
  for (const auto& e : fs::directory_iterator(*dir)) {
    if (e.path().extension() == ".png") hr.emplace_back(e.path().stem().string(), read_png(e.path()));
  }
  Outcome out{true, ""};
  for (int s = 2; s <= 4; ++s) {
    const EvalReport r = bicubic_baseline_report(hr, s);
    const double dp = r.mean_psnr - kSet5Psnr[s - 2];
    const double ds = r.mean_ssim - kSet5Ssim[s - 2];
    const bool ok = r.errors.empty() && std::abs(dp) <= kPsnrTol && std::abs(ds) <= kSsimTol;
    out.pass = out.pass && ok;
    out.detail += fmt("%sx%d %.4f/%.5f (target %.2f/%.4f)", s == 2 ? "" : "; ", s, r.mean_psnr, r.mean_ssim,
                      kSet5Psnr[s - 2], kSet5Ssim[s - 2]);
  }
  return out;
}

// ---------------------------------------------------------------- 3

constexpr double kGradPassFraction = 0.95;
constexpr double kGradMaxError = 5e-2;

// Smooth read-out so every coordinate of an op's output carries gradient.
Var project(Tape& t, Var out, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return sum(t, mul(t, out, t.constant(random_tensor(t.value(out).shape(), rng))));
}

Outcome gradient_checks() {
  GradCheckOptions opts;  // central differences, step 1e-3, relative error 1e-2
  std::vector<std::pair<std::string, GradCheckReport>> reports;
  std::mt19937_64 rng(2024);
  auto op = [&](const std::string& name, const LossBuilder& b, std::vector<Tensor> in) {
    reports.emplace_back(name, check_gradients(b, std::move(in), opts));
  };

  op("conv2d k3", [](Tape& t, std::span<const Var> v) { return project(t, conv2d(t, v[0], v[1], v[2]), 1); },
     {random_tensor({2, 3, 6, 6}, rng), random_tensor({4, 3, 3, 3}, rng), random_tensor({4, 1, 1, 1}, rng)});
  op("conv2d k5", [](Tape& t, std::span<const Var> v) { return project(t, conv2d(t, v[0], v[1], v[2]), 2); },
     {random_tensor({1, 2, 7, 6}, rng), random_tensor({3, 2, 5, 5}, rng), random_tensor({3, 1, 1, 1}, rng)});
  Tensor r = random_tensor({2, 4, 5, 5}, rng);
  for (float& v : r.data()) v += v >= 0 ? 0.05f : -0.05f;  // finite differences must not straddle the kink
  op("relu", [](Tape& t, std::span<const Var> v) { return project(t, relu(t, v[0]), 3); }, {r});
  op("add", [](Tape& t, std::span<const Var> v) { return project(t, add(t, v[0], v[1]), 4); },
     {random_tensor({2, 3, 4, 4}, rng), random_tensor({2, 3, 4, 4}, rng)});
  op("mul", [](Tape& t, std::span<const Var> v) { return project(t, mul(t, v[0], v[1]), 5); },
     {random_tensor({2, 3, 4, 4}, rng), random_tensor({2, 3, 4, 4}, rng)});
  op("scale", [](Tape& t, std::span<const Var> v) { return project(t, scale(t, v[0], 0.1f), 6); },
     {random_tensor({1, 4, 4, 4}, rng)});
  op("pixel_shuffle r2", [](Tape& t, std::span<const Var> v) { return project(t, pixel_shuffle(t, v[0], 2), 7); },
     {random_tensor({2, 8, 3, 4}, rng)});
  op("pixel_shuffle r3", [](Tape& t, std::span<const Var> v) { return project(t, pixel_shuffle(t, v[0], 3), 8); },
     {random_tensor({1, 9, 3, 2}, rng)});
  op("mean_shift", [](Tape& t, std::span<const Var> v) { return project(t, mean_shift(t, v[0], {110, 112, 101}, -1), 9); },
     {random_tensor({2, 3, 4, 4}, rng)});
  Tensor pred = random_tensor({2, 3, 5, 5}, rng), target = random_tensor({2, 3, 5, 5}, rng);
  for (std::int64_t i = 0; i < pred.numel(); ++i) {
    if (std::abs(pred[i] - target[i]) < 0.05f) pred[i] += 0.1f;
  }
  op("l1_loss", [](Tape& t, std::span<const Var> v) { return l1_loss(t, v[0], v[1]); }, {pred, target});
  op("l2_loss", [](Tape& t, std::span<const Var> v) { return l2_loss(t, v[0], v[1]); }, {pred, target});

  // Full models: L1 against a target 0.5 to 2 below the initial output, off the kink with coherent signs.
  GradCheckOptions model_opts = opts;
  model_opts.samples_per_input = 12;
  auto model_check = [&](const std::string& name, Model& m, int s, std::uint64_t seed) {
    std::mt19937_64 g(seed);
    Tensor lr = random_tensor({2, 3, 6, 6}, g, -8.0f, 8.0f);
    Tensor target = m.infer(lr, s);
    std::uniform_real_distribution<float> off(0.5f, 2.0f);
    for (float& v : target.data()) v -= off(g);
    model_opts.seed = seed;
    const auto build = [&](Tape& t) { return l1_loss(t, m.forward(t, t.constant(lr), s), t.constant(target)); };
    reports.emplace_back(name, check_parameter_gradients(m, build, model_opts));
  };
  // Zero mean keeps outputs near unit scale so float32 rounding stays below the finite-difference signal.
  Model edsr = build_edsr(ModelConfig::edsr(2, 8, 2), 11);
  model_check("edsr B2 F8 x2", edsr, 2, 12);
  Model mdsr = build_mdsr(ModelConfig::mdsr(2, 8), 13);
  for (int s : {2, 3, 4}) model_check("mdsr B2 F8 x" + std::to_string(s), mdsr, s, 14 + s);

  Outcome out{true, ""};
  double worst_fraction = 1.0, worst_error = 0.0;
  std::size_t checked = 0, kinks = 0;
  std::string failures;
  for (const auto& [name, r] : reports) {
    checked += r.checked;
    kinks += r.skipped_kink;
    worst_fraction = std::min(worst_fraction, r.pass_fraction());
    worst_error = std::max(worst_error, r.max_rel_error);
    if (r.checked == 0 || r.pass_fraction() < kGradPassFraction || r.max_rel_error > kGradMaxError) {
      out.pass = false;
      failures += fmt("; %s: %.3f pass, max %.3g (%s)", name.c_str(), r.pass_fraction(), r.max_rel_error, r.worst.c_str());
    }
  }
  out.detail = fmt("%zu checks, %zu coordinates (%zu more excluded for crossing a relu kink), min pass fraction %.4f, "
                   "max rel error %.3g",
                   reports.size(), checked, kinks, worst_fraction, worst_error) + failures;
  return out;
}

// ---------------------------------------------------------------- toy task shared by 4, 5, 8

constexpr int kToyImages = 4;
constexpr int kToySize = 96;
constexpr int kToyBlocks = 2;
constexpr int kToyFeats = 16;
constexpr int kToyUpdates = 2000;
constexpr int kToyBatch = 4;
constexpr int kToyPatch = 24;
constexpr double kToyLr = 1e-4;
constexpr std::uint64_t kToySeed = 1;

// Band-limited texture: oriented sinusoids below the x2 LR Nyquist rate, soft blobs and a
// ramp. Everything in it is recoverable from the LR image, so the loss can approach zero.
Image toy_image(int size, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  constexpr double kPi = 3.14159265358979323846;
  struct Wave {
    double kx, ky, phase;
    std::array<double, 3> amp;
  };
  std::vector<Wave> waves;
  for (int i = 0; i < 6; ++i) {
    const double f = (0.15 + 0.6 * u(rng)) * kPi / 2;  // radians per HR pixel, LR Nyquist is pi/2
    const double a = u(rng) * kPi;
    waves.push_back({f * std::cos(a), f * std::sin(a), u(rng) * 2 * kPi, {12 + 14 * u(rng), 12 + 14 * u(rng), 12 + 14 * u(rng)}});
  }
  struct Blob {
    double cx, cy, sigma;
    std::array<double, 3> amp;
  };
  std::vector<Blob> blobs;
  for (int i = 0; i < 4; ++i) {
    blobs.push_back({u(rng) * size, u(rng) * size, 4 + 8 * u(rng), {80 * u(rng) - 40, 80 * u(rng) - 40, 80 * u(rng) - 40}});
  }
  const double gx = 40 * (u(rng) - 0.5), gy = 40 * (u(rng) - 0.5);
  Image img(size, size);
  for (int y = 0; y < size; ++y) {
    for (int x = 0; x < size; ++x) {
      for (int c = 0; c < 3; ++c) {
        double v = 128 + gx * (x / double(size) - 0.5) + gy * (y / double(size) - 0.5);
        for (const auto& w : waves) v += w.amp[c] * std::sin(w.kx * x + w.ky * y + w.phase);
        for (const auto& b : blobs) {
          v += b.amp[c] * std::exp(-(std::pow(x - b.cx, 2) + std::pow(y - b.cy, 2)) / (2 * b.sigma * b.sigma));
        }
        img.at(x, y, c) = quantize_sample(v);
      }
    }
  }
  return img;
}

struct Toy {
  Manifest manifest;
  std::map<int, TrainingSet> sets;
};

const Toy& toy() {
  static const Toy t = [] {
    const fs::path root = scratch_dir("acceptance_toy");
    fs::create_directories(root / "hr");
    for (int i = 0; i < kToyImages; ++i) {
      write_png(toy_image(kToySize, 300 + i), root / "hr" / fmt("toy%d.png", i));
    }
    PrepareOptions opt;
    opt.dataset = "toy";
    opt.scales = {2, 4};
    Toy toy;
    toy.manifest = prepare_dataset(root / "hr", root / "data", opt).manifest;
    for (int s : {2, 4}) toy.sets[s] = load_training_set(toy.manifest, {s});
    return toy;
  }();
  return t;
}

ModelConfig toy_model(int scale) {
  ModelConfig c = ModelConfig::edsr(kToyBlocks, kToyFeats, scale);
  c.rgb_mean = toy().manifest.rgb_mean;
  return c;
}

TrainConfig toy_train(LossKind loss, int scale, std::int64_t updates, std::uint64_t seed) {
  TrainConfig c;
  c.loss = loss;
  c.lr0 = kToyLr;
  c.batch = kToyBatch;
  c.patch_lr = scale == 2 ? kToyPatch : kToyPatch / 2;
  c.max_updates = updates;
  c.seed = seed;
  c.scales = {scale};
  c.checkpoint_every = updates + 1;
  return c;
}

struct ToyRun {
  Checkpoint checkpoint;
  std::vector<double> losses;
  double seconds = 0.0;
};

const ToyRun& toy_run(LossKind loss) {
  static std::map<LossKind, ToyRun> cache;
  auto it = cache.find(loss);
  if (it != cache.end()) return it->second;
  const auto t0 = std::chrono::steady_clock::now();
  Model m = build_edsr(toy_model(2), kToySeed);
  const TrainResult r = train_single(m, toy().sets.at(2), toy_train(loss, 2, kToyUpdates, kToySeed));
  ToyRun run{r.checkpoint, {}, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count()};
  for (const auto& rec : r.curve) run.losses.push_back(rec.loss);
  return cache.emplace(loss, std::move(run)).first->second;
}

// Mean Y PSNR over the training images: model SR and bicubic upscale of the same 8-bit LR.
std::pair<double, double> training_psnr(const Model& m, int scale) {
  const Manifest& mf = toy().manifest;
  double sr_sum = 0.0, bic_sum = 0.0;
  int n = 0;
  for (const auto& e : mf.entries) {
    const Image hr = read_png(mf.root / e.hr);
    const Image lr = read_png(mf.root / e.lr.at(scale));
    const Image sr = to_image(m.infer(to_tensor(lr), scale));
    const Image bic = bicubic_resize(lr, hr.width, hr.height, true);
    const EvalProtocol p{Convention::benchmark, scale};
    sr_sum += score_pair(e.name, sr, hr, p).psnr;
    bic_sum += score_pair(e.name, bic, hr, p).psnr;
    ++n;
  }
  return {sr_sum / n, bic_sum / n};
}

double window_mean(const std::vector<double>& v, std::size_t begin, std::size_t end) {
  return std::accumulate(v.begin() + static_cast<std::ptrdiff_t>(begin), v.begin() + static_cast<std::ptrdiff_t>(end), 0.0) /
         static_cast<double>(end - begin);
}

// ---------------------------------------------------------------- 4

constexpr double kConvergenceRatio = 0.10;
constexpr double kPsnrGainDb = 1.0;

Outcome toy_convergence() {
  const ToyRun& run = toy_run(LossKind::l1);
  const double first = window_mean(run.losses, 0, 100);
  const double last = window_mean(run.losses, run.losses.size() - 100, run.losses.size());
  const auto [sr, bic] = training_psnr(run.checkpoint.restore(), 2);
  const bool ok = last <= kConvergenceRatio * first && sr - bic >= kPsnrGainDb;
  return {ok, fmt("L1 first100=%.4f last100=%.4f ratio=%.4f (need <= %.2f); SR %.3f dB vs bicubic %.3f dB, gain %.3f dB "
                  "(need >= %.1f); %d updates in %.1f s",
                  first, last, last / first, kConvergenceRatio, sr, bic, sr - bic, kPsnrGainDb, kToyUpdates, run.seconds)};
}

// ---------------------------------------------------------------- 5

// L1 on the 0-255 scale over a 20-update moving mean; pinned on the steep early part of traced x4 curves.
constexpr double kTransferThreshold = 12.0;
constexpr int kTransferWindow = 20;
constexpr int kTransferCap = 1500;
constexpr std::uint64_t kTransferSeeds[] = {1, 2, 3};

struct ThresholdReached {
  std::int64_t step;
};

// Updates until the moving mean of the L1 loss first drops to the threshold; cap + 1 if never.
std::int64_t updates_to_threshold(Model& m, std::uint64_t seed) {
  TrainOptions opts;
  std::deque<double> window;
  double acc = 0.0;
  opts.on_update = [&](const LossRecord& rec, const std::vector<std::string>&) {
    window.push_back(rec.loss);
    acc += rec.loss;
    if (static_cast<int>(window.size()) > kTransferWindow) {
      acc -= window.front();
      window.pop_front();
    }
    if (static_cast<int>(window.size()) == kTransferWindow && acc / kTransferWindow <= kTransferThreshold) {
      throw ThresholdReached{rec.step};
    }
  };
  try {
    train_single(m, toy().sets.at(4), toy_train(LossKind::l1, 4, kTransferCap, seed), nullptr, opts);
  } catch (const ThresholdReached& r) {
    return r.step;
  }
  return kTransferCap + 1;
}

Outcome transfer_property() {
  const Checkpoint& x2 = toy_run(LossKind::l1).checkpoint;
  std::vector<std::int64_t> scratch, transfer;
  for (std::uint64_t seed : kTransferSeeds) {
    Model fresh = build_edsr(toy_model(4), seed);
    scratch.push_back(updates_to_threshold(fresh, seed));
    Model warm = build_edsr(toy_model(4), seed);
    transfer_from(warm, x2);
    transfer.push_back(updates_to_threshold(warm, seed));
  }
  auto median = [](std::vector<std::int64_t> v) {
    std::sort(v.begin(), v.end());
    return v[v.size() / 2];
  };
  const auto ms = median(scratch), mt = median(transfer);
  auto list = [](const std::vector<std::int64_t>& v) {
    std::string s;
    for (auto x : v) s += (s.empty() ? "" : ",") + std::to_string(x);
    return s;
  };
  return {mt < ms, fmt("updates to moving-mean L1 <= %.1f: from x2 [%s] median %lld, from scratch [%s] median %lld (cap %d)",
                       kTransferThreshold, list(transfer).c_str(), static_cast<long long>(mt), list(scratch).c_str(),
                       static_cast<long long>(ms), kTransferCap)};
}

// ---------------------------------------------------------------- 6

constexpr int kMaskingUpdates = 100;

Outcome mdsr_masking() {
  const fs::path dir = scratch_dir("acceptance_masking");
  const TrainingSet set = srforge::testing::synthetic_training_set(2, 48, {2, 3, 4}, 40);
  Model m = build_mdsr(ModelConfig::mdsr(2, 8), 5);
  save_checkpoint(Checkpoint::capture(m), dir / "ckpt_00000000.srfg");
  TrainConfig cfg;
  cfg.batch = 4;
  cfg.patch_lr = 8;
  cfg.max_updates = kMaskingUpdates;
  cfg.checkpoint_every = 1;
  cfg.seed = 6;
  TrainOptions opts;
  opts.run_dir = dir;
  train_multi(m, set, cfg, nullptr, opts);

  std::ifstream log(dir / "loss.log");
  std::vector<int> scales;
  for (std::string line; std::getline(log, line);) {
    std::istringstream is(line);
    long long step;
    int scale;
    is >> step >> scale;
    scales.push_back(scale);
  }
  if (static_cast<int>(scales.size()) != kMaskingUpdates) {
    return {false, fmt("loss log has %zu records, expected %d", scales.size(), kMaskingUpdates)};
  }
  std::map<int, int> per_scale;
  int bad_steps = 0;
  std::string first_bad;
  Checkpoint prev = load_checkpoint(dir / "ckpt_00000000.srfg");
  for (int k = 1; k <= kMaskingUpdates; ++k) {
    const Checkpoint cur = load_checkpoint(dir / fmt("ckpt_%08d.srfg", k));
    const int s = scales[static_cast<std::size_t>(k - 1)];
    ++per_scale[s];
    std::string why;
    for (const auto& p : cur.params) {
      const int b = branch_scale(p.name);
      const bool expect_change = b == 0 || b == s;
      const bool changed = !p.value.bit_equal(prev.find(p.name)->value);
      if (changed != expect_change) why = p.name + (changed ? " changed" : " unchanged");
      const auto before = std::as_const(prev).moments.find(p.name);
      const auto after = cur.moments.find(p.name);
      const bool moment_changed =
          (before == prev.moments.end()) != (after == cur.moments.end()) ||
          (after != cur.moments.end() && (after->second.t != before->second.t || !after->second.m.bit_equal(before->second.m)));
      if (moment_changed != expect_change) why = p.name + " moments " + (moment_changed ? "changed" : "unchanged");
    }
    if (!why.empty()) {
      if (++bad_steps == 1) first_bad = fmt("step %d (x%d): %s", k, s, why.c_str());
    }
    prev = cur;
  }
  return {bad_steps == 0 && per_scale.size() == 3,
          fmt("%d steps replayed (x2:%d x3:%d x4:%d), %d violations%s%s", kMaskingUpdates, per_scale[2], per_scale[3],
              per_scale[4], bad_steps, first_bad.empty() ? "" : "; first ", first_bad.c_str())};
}

// ---------------------------------------------------------------- 7

constexpr double kEquivarianceTol = 1e-5;

Outcome self_ensemble_equivariance() {
  double worst = 0.0;
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 10; ++trial) {
    const bool multi = trial % 2 == 1;
    const int scale = 2 + trial % 3;
    const Model m = multi ? build_mdsr(ModelConfig::mdsr(1, 6), 100 + trial)
                          : build_edsr(ModelConfig::edsr(1, 6, scale), 100 + trial);
    const Upscaler up = as_upscaler(m, scale);
    const Tensor x = random_tensor({1, 3, 5 + trial % 3, 7}, rng, 0.0f, 255.0f);
    const Tensor base = self_ensemble(up, x);
    for (const auto& t : GeomTransform::all()) {
      const Tensor a = self_ensemble(up, t.apply(x));
      const Tensor b = t.apply(base);
      for (std::int64_t i = 0; i < a.numel(); ++i) worst = std::max(worst, double(std::abs(a[i] - b[i])));
    }
  }
  return {worst <= kEquivarianceTol, fmt("10 models x 8 transforms, max |SE(T x) - T SE(x)| = %.3g (tol %.0e)", worst, kEquivarianceTol)};
}

// ---------------------------------------------------------------- 8

constexpr double kL1L2SlackDb = 0.2;

Outcome l1_vs_l2() {
  const double l1 = training_psnr(toy_run(LossKind::l1).checkpoint.restore(), 2).first;
  const double l2 = training_psnr(toy_run(LossKind::l2).checkpoint.restore(), 2).first;
  return {l1 >= l2 - kL1L2SlackDb, fmt("training PSNR L1 %.3f dB, L2 %.3f dB (need L1 >= L2 - %.1f)", l1, l2, kL1L2SlackDb)};
}

struct Criterion {
  int id;
  const char* name;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"srforge acceptance suite"};
  int only = 0;
  app.add_option("--only", only, "Run a single criterion")->check(CLI::Range(1, 8));
  CLI11_PARSE(app, argc, argv);

  const Criterion criteria[] = {{1, "parameter counts", param_counts},
                                {2, "bicubic baselines", bicubic_baselines},
                                {3, "gradient correctness", gradient_checks},
                                {4, "toy convergence", toy_convergence},
                                {5, "transfer from x2", transfer_property},
                                {6, "mdsr masking", mdsr_masking},
                                {7, "self-ensemble equivariance", self_ensemble_equivariance},
                                {8, "l1 vs l2", l1_vs_l2}};
  int failed = 0;
  for (const auto& c : criteria) {
    if (only != 0 && c.id != only) continue;
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    failed += !o.pass;
    std::printf("criterion %d %s: %s | %s\n", c.id, c.name, o.pass ? "PASS" : "FAIL", o.detail.c_str());
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
