#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "srforge/autograd.hpp"
#include "srforge/model.hpp"

namespace srforge {

struct GradCheckOptions {
  double step = 1e-3;
  double rel_tol = 1e-2;
  /// The error of a coordinate is |backward - numeric| / max(|backward|, |numeric|, floor)
  /// with floor = relative_floor * RMS of that input's backward gradient. Float32 forward
  /// passes leave about 1e-4 of absolute noise in the central difference, which the floor
  /// keeps from dominating coordinates whose gradient nearly cancels.
  double relative_floor = 0.1;
  /// Coordinates whose denominator is below this are not scored (all-zero gradients).
  double min_magnitude = 1e-7;
  /// Coordinates sampled per input tensor; 0 checks every coordinate.
  std::size_t samples_per_input = 0;
  std::uint64_t seed = 0;
};

struct GradCheckReport {
  std::size_t checked = 0;
  std::size_t passed = 0;
  std::size_t skipped_small = 0;
  /// Coordinates whose +step or -step pass flipped a ReLU: the loss is not
  /// differentiable across that interval, so central differences do not apply.
  std::size_t skipped_kink = 0;
  double max_rel_error = 0.0;
  std::string worst;

  double pass_fraction() const { return checked == 0 ? 1.0 : double(passed) / double(checked); }
};

/// Builds a scalar loss from tape leaves holding the current inputs.
using LossBuilder = std::function<Var(Tape&, std::span<const Var>)>;

/// Compares backward() against central differences of the forward pass.
/// The perturbation actually realized in float is used as the denominator.
GradCheckReport check_gradients(const LossBuilder& build, std::vector<Tensor> inputs,
                                const GradCheckOptions& options = {});

/// Records a scalar loss that reads the model's parameters through Tape::parameter.
using ModelLossBuilder = std::function<Var(Tape&)>;

/// Same comparison for every parameter the loss binds: backward() against
/// central differences taken by perturbing the model's own tensors.
GradCheckReport check_parameter_gradients(Model& model, const ModelLossBuilder& build,
                                          const GradCheckOptions& options = {});

}  // namespace srforge
