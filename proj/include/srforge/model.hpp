#pragma once

#include <array>
#include <random>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "srforge/autograd.hpp"
#include "srforge/ops.hpp"

namespace srforge {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class ModelKind { single, multi };

std::string_view to_string(ModelKind kind);
ModelKind model_kind_from_string(std::string_view s);

struct ModelConfig {
  ModelKind kind = ModelKind::single;
  int num_blocks = 16;
  int num_feats = 64;
  std::vector<int> scales{2};
  float res_scale = 1.0f;
  /// Dataset mean in the 0-255 domain, subtracted at the input and added back at the output.
  std::array<float, 3> rgb_mean{0.0f, 0.0f, 0.0f};
  int trunk_kernel = 3;
  int head_kernel_multi = 5;

  void validate() const;
  bool supports(int scale) const;

  /// Single-scale config; residual scaling is 0.1 for the 256-wide model, 1 otherwise.
  static ModelConfig edsr(int num_blocks, int num_feats, int scale);
  static ModelConfig mdsr(int num_blocks, int num_feats);

  bool operator==(const ModelConfig&) const = default;
};

float default_res_scale(int num_feats);

struct NamedParam {
  std::string name;
  /// Declared shape: {out, in, k, k} for weights, {out} for biases.
  std::vector<std::int64_t> dims;
  Tensor value;
};

/// Tape handles of one convolution's weight and bias.
struct ConvVars {
  Var weight;
  Var bias;
};

/// x + res_scale * conv2(relu(conv1(x))).
Var res_block(Tape& tape, Var x, ConvVars conv1, ConvVars conv2, float res_scale);

/// Channel multipliers of the sub-pixel stages for `scale`: x2 -> {4}, x3 -> {9}, x4 -> {4, 4}.
std::vector<int> upsampler_stages(int scale);
/// Each stage is conv(F -> r^2 F) followed by pixel_shuffle(r).
Var upsampler(Tape& tape, Var x, int scale, std::span<const ConvVars> stages);

/// Adds sign * rgb_mean per channel; input must have 3 channels.
Var mean_shift(Tape& tape, Var x, const std::array<float, 3>& rgb_mean, int sign);
Tensor mean_shift(const Tensor& x, const std::array<float, 3>& rgb_mean, int sign);

class Model {
 public:
  const ModelConfig& config() const { return config_; }

  /// Records the network on `tape`. Only the shared parameters and those of the
  /// requested scale's branch are bound.
  Var forward(Tape& tape, Var lr, int scale) const;
  /// Gradient-free forward pass.
  Tensor infer(const Tensor& lr, int scale) const;

  std::span<const NamedParam> parameters() const { return params_; }
  std::span<NamedParam> parameters() { return params_; }
  bool has_parameter(std::string_view name) const;
  const NamedParam& parameter(std::string_view name) const;
  NamedParam& parameter(std::string_view name);

  /// Adds the tape's parameter gradients into each parameter's grad slot.
  void accumulate_gradients(const Tape& tape);
  void zero_gradients();

  friend Model build_edsr(const ModelConfig& cfg, std::uint64_t seed);
  friend Model build_mdsr(const ModelConfig& cfg, std::uint64_t seed);

 private:
  explicit Model(ModelConfig cfg) : config_(std::move(cfg)) {}

  void add_conv(const std::string& prefix, int in_ch, int out_ch, int k, std::mt19937_64& rng);
  ConvVars bind(Tape& tape, const std::string& prefix) const;
  Var trunk(Tape& tape, Var x) const;

  ModelConfig config_;
  std::vector<NamedParam> params_;
  std::unordered_map<std::string, std::size_t> index_;
};

Model build_edsr(const ModelConfig& cfg, std::uint64_t seed = 0);
Model build_mdsr(const ModelConfig& cfg, std::uint64_t seed = 0);
/// Dispatches on cfg.kind.
Model build_model(const ModelConfig& cfg, std::uint64_t seed = 0);

std::int64_t param_count(const Model& model);

/// Scale of the branch a parameter belongs to, or 0 for shared parameters.
int branch_scale(std::string_view param_name);

}  // namespace srforge
