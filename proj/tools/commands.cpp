#include "commands.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <set>

#include "srforge/checkpoint.hpp"
#include "srforge/config_io.hpp"
#include "srforge/ensemble.hpp"
#include "srforge/evaluation.hpp"
#include "srforge/manifest.hpp"
#include "srforge/parallel.hpp"
#include "srforge/trainer.hpp"

namespace srforge::cli {

namespace fs = std::filesystem;

std::string group_thousands(std::int64_t v) {
  std::string digits = std::to_string(v < 0 ? -v : v);
  std::string out;
  for (std::size_t i = 0; i < digits.size(); ++i) {
    if (i > 0 && (digits.size() - i) % 3 == 0) out += ',';
    out += digits[i];
  }
  return v < 0 ? "-" + out : out;
}

namespace {

bool is_png(const fs::path& p) {
  std::string ext = p.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  return ext == ".png";
}

std::map<std::string, fs::path> pngs_by_stem(const fs::path& dir) {
  std::map<std::string, fs::path> out;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.is_regular_file() && is_png(e.path())) out[e.path().stem().string()] = e.path();
  }
  return out;
}

std::string dims_str(const std::vector<std::int64_t>& d) {
  std::string s;
  for (std::size_t i = 0; i < d.size(); ++i) s += (i ? "x" : "") + std::to_string(d[i]);
  return s;
}

}  // namespace

int run_prepare(const PrepareArgs& args) {
  PrepareOptions opt;
  opt.dataset = args.dataset;
  opt.scales = args.scales;
  opt.val_names.insert(args.val_names.begin(), args.val_names.end());
  const PrepareResult r = prepare_dataset(args.hr_dir, args.out, opt);
  for (const auto& s : r.skipped) std::cerr << "skipped " << s << '\n';
  std::set<std::string> found;
  std::size_t val = 0;
  for (const auto& e : r.manifest.entries) {
    found.insert(e.name);
    if (e.split == "val") ++val;
  }
  for (const auto& n : args.val_names) {
    if (!found.count(n)) std::cerr << "warning: --val-names entry \"" << n << "\" matched no image\n";
  }
  const auto& m = r.manifest.rgb_mean;
  std::printf("prepared %zu images (%zu train, %zu val, %zu skipped) in %s\n", r.manifest.entries.size(),
              r.manifest.entries.size() - val, val, r.skipped.size(), args.out.string().c_str());
  std::printf("rgb_mean %.4f %.4f %.4f\n", m[0], m[1], m[2]);
  return kExitOk;
}

int run_train(const TrainArgs& args) {
  const Manifest manifest = load_manifest(args.manifest);
  const nlohmann::json model_json = read_json_file(args.model_config);
  ModelConfig mc = model_config_from_json(model_json);
  // The dataset mean comes from the manifest unless the model config pins one.
  if (!model_json.contains("rgb_mean")) mc.rgb_mean = manifest.rgb_mean;
  TrainConfig tc = load_train_config(args.train_config);
  if (args.seed) tc.seed = *args.seed;
  if (args.max_updates) tc.max_updates = *args.max_updates;
  tc.validate();

  std::optional<Checkpoint> resume;
  if (!args.resume.empty()) {
    resume = load_checkpoint(args.resume);
    // A resumed run keeps the architecture (including the mean) it was started with.
    if (resume->config.rgb_mean != mc.rgb_mean && !model_json.contains("rgb_mean")) {
      mc.rgb_mean = resume->config.rgb_mean;
    }
  }

  Model model = build_model(mc, tc.seed);
  if (!args.pretrained.empty()) {
    const TransferReport rep = transfer_from(model, load_checkpoint(args.pretrained));
    std::printf("pretrained: copied %zu tensors, kept fresh init for %zu\n", rep.copied.size(), rep.skipped.size());
    for (const auto& n : rep.skipped) std::printf("  fresh %s\n", n.c_str());
  }

  const std::vector<int> scales = mc.kind == ModelKind::multi ? tc.scales : mc.scales;
  const TrainingSet set = load_training_set(manifest, scales);

  std::printf("model %s B=%d F=%d params=%s; %lld updates, batch %d, patch %d\n", std::string(to_string(mc.kind)).c_str(),
              mc.num_blocks, mc.num_feats, group_thousands(param_count(model)).c_str(),
              static_cast<long long>(tc.max_updates), tc.batch, tc.patch_lr);
  std::fflush(stdout);

  TrainOptions opts;
  opts.run_dir = args.out;
  opts.on_update = [&](const LossRecord& rec, const std::vector<std::string>&) {
    if (rec.step % args.log_every == 0 || rec.step == tc.max_updates) {
      std::printf("%s\n", format_loss_record(rec).c_str());
      std::fflush(stdout);
    }
  };
  const Checkpoint* resume_ptr = resume ? &*resume : nullptr;
  const TrainResult r = mc.kind == ModelKind::multi ? train_multi(model, set, tc, resume_ptr, opts)
                                                    : train_single(model, set, tc, resume_ptr, opts);
  std::printf("done: step %lld, checkpoint in %s\n", static_cast<long long>(r.checkpoint.step),
              args.out.string().c_str());
  return kExitOk;
}

int run_sr(const SrArgs& args) {
  const Model model = load_checkpoint(args.checkpoint).restore();
  const ModelConfig& mc = model.config();
  int scale = args.scale;
  if (scale == 0) {
    if (mc.scales.size() != 1) throw UsageError("--scale is required for a multi-scale model");
    scale = mc.scales.front();
  }
  if (!mc.supports(scale)) throw UsageError("model does not serve x" + std::to_string(scale));

  std::vector<fs::path> files;
  std::vector<std::string> errors;
  for (const auto& in : args.inputs) {
    if (fs::is_directory(in)) {
      for (const auto& [_, p] : pngs_by_stem(in)) files.push_back(p);
    } else if (fs::is_regular_file(in)) {
      files.push_back(in);
    } else {
      errors.push_back(in.string() + ": no such file or directory");
    }
  }
  fs::create_directories(args.out);
  const Upscaler up = as_upscaler(model, scale);
  for (const auto& f : files) {
    try {
      const Tensor lr = to_tensor(read_png(f));
      const Tensor out = args.self_ensemble ? self_ensemble(up, lr) : up(lr);
      const fs::path dst = args.out / (f.stem().string() + ".png");
      write_png(to_image(out), dst);
      std::printf("%s -> %s\n", f.string().c_str(), dst.string().c_str());
    } catch (const std::exception& e) {
      errors.push_back(f.string() + ": " + e.what());
    }
  }
  for (const auto& e : errors) std::cerr << "error: " << e << '\n';
  return errors.empty() ? kExitOk : kExitFailure;
}

int run_eval(const EvalArgs& args) {
  const EvalProtocol protocol{convention_from_string(args.convention), args.scale};
  const auto sr = pngs_by_stem(args.sr_dir);
  const auto gt = pngs_by_stem(args.gt_dir);
  std::vector<NamedImagePair> pairs;
  std::vector<std::string> missing;
  for (const auto& [name, path] : gt) {
    auto it = sr.find(name);
    if (it == sr.end()) {
      missing.push_back(name + ": no SR image");
      continue;
    }
    pairs.push_back({name, read_png(it->second), read_png(path)});
  }
  for (const auto& [name, _] : sr) {
    if (!gt.count(name)) missing.push_back(name + ": no ground-truth image");
  }
  if (pairs.empty() && missing.empty()) throw UsageError("no PNG images in " + args.gt_dir.string());
  EvalReport report = evaluate(pairs, protocol);
  report.errors.insert(report.errors.end(), missing.begin(), missing.end());
  report.finalize();
  const std::string text = report.to_text();
  std::cout << text;
  if (!args.report.empty()) {
    std::ofstream out(args.report);
    if (!out) throw UsageError("cannot write " + args.report.string());
    out << text;
  }
  return report.errors.empty() ? kExitOk : kExitFailure;
}

int run_inspect(const InspectArgs& args) {
  const Checkpoint c = load_checkpoint(args.checkpoint);
  std::printf("format: version %u\n", c.version);
  std::printf("config: %s\n", to_json(c.config).dump().c_str());
  std::int64_t total = 0;
  for (const auto& p : c.params) total += p.value.numel();
  std::printf("params: %s\n", group_thousands(total).c_str());
  std::printf("step: %lld\n", static_cast<long long>(c.step));
  std::printf("adam moments: %zu tensors\n", c.moments.size());
  for (const auto& p : c.params) {
    auto it = c.moments.find(p.name);
    const long long t = it == c.moments.end() ? 0 : static_cast<long long>(it->second.t);
    std::printf("  %-28s %-14s adam_t=%lld\n", p.name.c_str(), dims_str(p.dims).c_str(), t);
  }
  return kExitOk;
}

}  // namespace srforge::cli
