#include "srforge/model.hpp"

#include <algorithm>
#include <cmath>

namespace srforge {

std::string_view to_string(ModelKind kind) { return kind == ModelKind::single ? "single" : "multi"; }

ModelKind model_kind_from_string(std::string_view s) {
  if (s == "single") return ModelKind::single;
  if (s == "multi") return ModelKind::multi;
  throw ConfigError("kind: expected \"single\" or \"multi\", got \"" + std::string(s) + "\"");
}

float default_res_scale(int num_feats) { return num_feats == 256 ? 0.1f : 1.0f; }

void ModelConfig::validate() const {
  if (num_blocks < 1) throw ConfigError("num_blocks: must be positive");
  if (num_feats < 1) throw ConfigError("num_feats: must be positive");
  if (!(res_scale > 0.0f && res_scale <= 1.0f)) throw ConfigError("res_scale: must lie in (0, 1]");
  if (trunk_kernel != 3) throw ConfigError("trunk_kernel: only 3 is supported");
  if (head_kernel_multi != 5) throw ConfigError("head_kernel_multi: only 5 is supported");
  for (int s : scales) {
    if (s < 2 || s > 4) throw ConfigError("scales: unsupported scale " + std::to_string(s));
  }
  if (kind == ModelKind::single && scales.size() != 1) {
    throw ConfigError("scales: a single-scale model needs exactly one scale");
  }
  if (kind == ModelKind::multi && scales != std::vector<int>{2, 3, 4}) {
    throw ConfigError("scales: a multi-scale model must serve exactly {2, 3, 4}");
  }
  for (float m : rgb_mean) {
    if (!(m >= 0.0f && m <= 255.0f)) throw ConfigError("rgb_mean: values must lie in [0, 255]");
  }
}

bool ModelConfig::supports(int scale) const {
  return std::find(scales.begin(), scales.end(), scale) != scales.end();
}

ModelConfig ModelConfig::edsr(int num_blocks, int num_feats, int scale) {
  ModelConfig cfg;
  cfg.kind = ModelKind::single;
  cfg.num_blocks = num_blocks;
  cfg.num_feats = num_feats;
  cfg.scales = {scale};
  cfg.res_scale = default_res_scale(num_feats);
  return cfg;
}

ModelConfig ModelConfig::mdsr(int num_blocks, int num_feats) {
  ModelConfig cfg;
  cfg.kind = ModelKind::multi;
  cfg.num_blocks = num_blocks;
  cfg.num_feats = num_feats;
  cfg.scales = {2, 3, 4};
  cfg.res_scale = default_res_scale(num_feats);
  return cfg;
}

Var res_block(Tape& tape, Var x, ConvVars conv1, ConvVars conv2, float res_scale) {
  Var h = conv2d(tape, x, conv1.weight, conv1.bias);
  h = relu(tape, h);
  h = conv2d(tape, h, conv2.weight, conv2.bias);
  if (res_scale != 1.0f) h = scale(tape, h, res_scale);
  return add(tape, x, h);
}

std::vector<int> upsampler_stages(int scale) {
  switch (scale) {
    case 2: return {4};
    case 3: return {9};
    case 4: return {4, 4};
    default: throw ConfigError("upsampler: unsupported scale " + std::to_string(scale));
  }
}

Var upsampler(Tape& tape, Var x, int scale, std::span<const ConvVars> stages) {
  const auto multipliers = upsampler_stages(scale);
  if (stages.size() != multipliers.size()) {
    throw ConfigError("upsampler: x" + std::to_string(scale) + " needs " +
                      std::to_string(multipliers.size()) + " conv stages");
  }
  for (std::size_t i = 0; i < stages.size(); ++i) {
    x = conv2d(tape, x, stages[i].weight, stages[i].bias);
    x = pixel_shuffle(tape, x, multipliers[i] == 9 ? 3 : 2);
  }
  return x;
}

Var mean_shift(Tape& tape, Var x, const std::array<float, 3>& rgb_mean, int sign) {
  if (tape.value(x).shape().c != 3) throw ShapeError("mean_shift expects a 3-channel input");
  const std::array<float, 3> offsets{sign * rgb_mean[0], sign * rgb_mean[1], sign * rgb_mean[2]};
  return channel_offset(tape, x, offsets);
}

Tensor mean_shift(const Tensor& x, const std::array<float, 3>& rgb_mean, int sign) {
  if (x.shape().c != 3) throw ShapeError("mean_shift expects a 3-channel input");
  const std::array<float, 3> offsets{sign * rgb_mean[0], sign * rgb_mean[1], sign * rgb_mean[2]};
  return channel_offset(x, offsets);
}

int branch_scale(std::string_view name) {
  for (int s : {2, 3, 4}) {
    const std::string tag = ".x" + std::to_string(s) + ".";
    if (name.find(tag) != std::string_view::npos) return s;
  }
  return 0;
}

bool Model::has_parameter(std::string_view name) const {
  return index_.count(std::string(name)) != 0;
}

const NamedParam& Model::parameter(std::string_view name) const {
  auto it = index_.find(std::string(name));
  if (it == index_.end()) throw UsageError("unknown parameter " + std::string(name));
  return params_[it->second];
}

NamedParam& Model::parameter(std::string_view name) {
  return const_cast<NamedParam&>(static_cast<const Model&>(*this).parameter(name));
}

void Model::add_conv(const std::string& prefix, int in_ch, int out_ch, int k,
                     std::mt19937_64& rng) {
  const float bound = static_cast<float>(std::sqrt(1.0 / (double(in_ch) * k * k)));
  std::uniform_real_distribution<float> dist(-bound, bound);
  Tensor w({out_ch, in_ch, k, k});
  for (float& v : w.data()) v = dist(rng);
  params_.push_back({prefix + ".weight", {out_ch, in_ch, k, k}, std::move(w)});
  index_[params_.back().name] = params_.size() - 1;
  params_.push_back({prefix + ".bias", {out_ch}, Tensor({out_ch, 1, 1, 1})});
  index_[params_.back().name] = params_.size() - 1;
}

ConvVars Model::bind(Tape& tape, const std::string& prefix) const {
  const std::string w = prefix + ".weight";
  const std::string b = prefix + ".bias";
  return {tape.parameter(w, parameter(w).value), tape.parameter(b, parameter(b).value)};
}

Var Model::trunk(Tape& tape, Var x) const {
  Var r = x;
  for (int i = 0; i < config_.num_blocks; ++i) {
    const std::string p = "body." + std::to_string(i);
    r = res_block(tape, r, bind(tape, p + ".conv1"), bind(tape, p + ".conv2"), config_.res_scale);
  }
  const ConvVars end = bind(tape, "body_end");
  r = conv2d(tape, r, end.weight, end.bias);
  return add(tape, r, x);
}

Var Model::forward(Tape& tape, Var lr, int scale) const {
  if (!config_.supports(scale)) {
    throw ConfigError("model does not serve scale x" + std::to_string(scale));
  }
  const Shape s = tape.value(lr).shape();
  if (s.c != 3) throw ShapeError("model input must have 3 channels, got " + s.str());

  Var x = mean_shift(tape, lr, config_.rgb_mean, -1);
  const ConvVars head = bind(tape, "head");
  x = conv2d(tape, x, head.weight, head.bias);

  std::string up_prefix = "upsampler";
  if (config_.kind == ModelKind::multi) {
    const std::string tag = ".x" + std::to_string(scale);
    for (int i = 0; i < 2; ++i) {
      const std::string p = "pre" + tag + "." + std::to_string(i);
      x = res_block(tape, x, bind(tape, p + ".conv1"), bind(tape, p + ".conv2"), 1.0f);
    }
    up_prefix += tag;
  }

  x = trunk(tape, x);

  std::vector<ConvVars> stages;
  for (std::size_t i = 0; i < upsampler_stages(scale).size(); ++i) {
    stages.push_back(bind(tape, up_prefix + "." + std::to_string(i)));
  }
  x = upsampler(tape, x, scale, stages);

  const ConvVars tail = bind(tape, "tail");
  x = conv2d(tape, x, tail.weight, tail.bias);
  return mean_shift(tape, x, config_.rgb_mean, +1);
}

Tensor Model::infer(const Tensor& lr, int scale) const {
  Tape tape(false);
  Var out = forward(tape, tape.constant(lr), scale);
  return tape.value(out);
}

void Model::accumulate_gradients(const Tape& tape) {
  for (auto& [name, g] : tape.parameter_gradients()) {
    Tensor& p = parameter(name).value;
    p.enable_grad();
    auto dst = p.grad();
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += g.data()[i];
  }
}

void Model::zero_gradients() {
  for (auto& p : params_) p.value.zero_grad();
}

Model build_edsr(const ModelConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  if (cfg.kind != ModelKind::single) throw ConfigError("build_edsr needs kind=single");
  Model m(cfg);
  std::mt19937_64 rng(seed);
  const int f = cfg.num_feats;
  const int k = cfg.trunk_kernel;
  m.add_conv("head", 3, f, k, rng);
  for (int i = 0; i < cfg.num_blocks; ++i) {
    const std::string p = "body." + std::to_string(i);
    m.add_conv(p + ".conv1", f, f, k, rng);
    m.add_conv(p + ".conv2", f, f, k, rng);
  }
  m.add_conv("body_end", f, f, k, rng);
  const auto stages = upsampler_stages(cfg.scales.front());
  for (std::size_t i = 0; i < stages.size(); ++i) {
    m.add_conv("upsampler." + std::to_string(i), f, stages[i] * f, k, rng);
  }
  m.add_conv("tail", f, 3, k, rng);
  return m;
}

Model build_mdsr(const ModelConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  if (cfg.kind != ModelKind::multi) throw ConfigError("build_mdsr needs kind=multi");
  Model m(cfg);
  std::mt19937_64 rng(seed);
  const int f = cfg.num_feats;
  const int k = cfg.trunk_kernel;
  m.add_conv("head", 3, f, k, rng);
  for (int s : cfg.scales) {
    for (int i = 0; i < 2; ++i) {
      const std::string p = "pre.x" + std::to_string(s) + "." + std::to_string(i);
      m.add_conv(p + ".conv1", f, f, cfg.head_kernel_multi, rng);
      m.add_conv(p + ".conv2", f, f, cfg.head_kernel_multi, rng);
    }
  }
  for (int i = 0; i < cfg.num_blocks; ++i) {
    const std::string p = "body." + std::to_string(i);
    m.add_conv(p + ".conv1", f, f, k, rng);
    m.add_conv(p + ".conv2", f, f, k, rng);
  }
  m.add_conv("body_end", f, f, k, rng);
  for (int s : cfg.scales) {
    const auto stages = upsampler_stages(s);
    for (std::size_t i = 0; i < stages.size(); ++i) {
      m.add_conv("upsampler.x" + std::to_string(s) + "." + std::to_string(i), f, stages[i] * f, k,
                 rng);
    }
  }
  m.add_conv("tail", f, 3, k, rng);
  return m;
}

Model build_model(const ModelConfig& cfg, std::uint64_t seed) {
  return cfg.kind == ModelKind::single ? build_edsr(cfg, seed) : build_mdsr(cfg, seed);
}

std::int64_t param_count(const Model& model) {
  std::int64_t total = 0;
  for (const auto& p : model.parameters()) total += p.value.numel();
  return total;
}

}  // namespace srforge
