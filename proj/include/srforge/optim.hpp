#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "srforge/model.hpp"

namespace srforge {

struct TrainingError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct AdamHyper {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;

  bool operator==(const AdamHyper&) const = default;
};

/// Per-parameter Adam moments. `t` counts the updates this parameter received,
/// so a branch that sits out a step keeps both its moments and its bias correction.
struct AdamMoments {
  Tensor m;
  Tensor v;
  std::int64_t t = 0;
};

using AdamState = std::map<std::string, AdamMoments>;

/// One bias-corrected Adam update of a flat parameter. Throws TrainingError on a
/// non-finite gradient before touching anything.
void adam_update(std::span<float> param, std::span<const float> grad, AdamMoments& moments,
                 const AdamHyper& hyper, double lr);

/// Updates exactly the parameters present in `grads`; returns their names.
std::vector<std::string> adam_step(Model& model, const std::map<std::string, Tensor>& grads,
                                   AdamState& state, const AdamHyper& hyper, double lr);

}  // namespace srforge
