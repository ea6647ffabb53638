#pragma once

#include <functional>
#include <span>

#include "srforge/geometry.hpp"
#include "srforge/model.hpp"

namespace srforge {

/// Any LR -> SR mapping on 1x3xHxW tensors.
using Upscaler = std::function<Tensor(const Tensor&)>;

/// Geometric self-ensemble: runs `model` on every transformed input, maps each
/// output back with the inverse transform and returns the float mean.
Tensor self_ensemble(const Upscaler& model, const Tensor& lr,
                     std::span<const GeomTransform> transforms);
Tensor self_ensemble(const Upscaler& model, const Tensor& lr);

Upscaler as_upscaler(const Model& model, int scale);

}  // namespace srforge
