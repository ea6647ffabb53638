#include "srforge/optim.hpp"

#include <cmath>

namespace srforge {

namespace {

void check_finite(std::span<const float> grad, const std::string& name) {
  for (std::size_t i = 0; i < grad.size(); ++i) {
    if (!std::isfinite(grad[i])) {
      throw TrainingError("non-finite gradient in " + (name.empty() ? "parameter" : name) +
                          " at index " + std::to_string(i) + " (value " +
                          std::to_string(grad[i]) + ")");
    }
  }
}

}  // namespace

void adam_update(std::span<float> param, std::span<const float> grad, AdamMoments& moments,
                 const AdamHyper& hyper, double lr) {
  if (param.size() != grad.size()) throw ShapeError("adam_update: gradient length mismatch");
  check_finite(grad, "");
  const auto n = static_cast<std::int64_t>(param.size());
  if (moments.m.numel() != n) moments.m = Tensor({n, 1, 1, 1});
  if (moments.v.numel() != n) moments.v = Tensor({n, 1, 1, 1});
  moments.t += 1;
  const double c1 = 1.0 - std::pow(hyper.beta1, static_cast<double>(moments.t));
  const double c2 = 1.0 - std::pow(hyper.beta2, static_cast<double>(moments.t));
  auto m = moments.m.data();
  auto v = moments.v.data();
  for (std::size_t i = 0; i < param.size(); ++i) {
    const double g = grad[i];
    const double mi = hyper.beta1 * m[i] + (1.0 - hyper.beta1) * g;
    const double vi = hyper.beta2 * v[i] + (1.0 - hyper.beta2) * g * g;
    m[i] = static_cast<float>(mi);
    v[i] = static_cast<float>(vi);
    const double mhat = mi / c1;
    const double vhat = vi / c2;
    param[i] = static_cast<float>(param[i] - lr * mhat / (std::sqrt(vhat) + hyper.eps));
  }
}

std::vector<std::string> adam_step(Model& model, const std::map<std::string, Tensor>& grads,
                                   AdamState& state, const AdamHyper& hyper, double lr) {
  for (const auto& [name, g] : grads) {
    if (!model.has_parameter(name)) throw UsageError("gradient for unknown parameter " + name);
    if (g.numel() != model.parameter(name).value.numel()) {
      throw ShapeError("adam_step: gradient shape mismatch for " + name);
    }
    check_finite(g.data(), name);
  }
  std::vector<std::string> updated;
  for (const auto& [name, g] : grads) {
    NamedParam& p = model.parameter(name);
    AdamMoments& mom = state[name];
    if (mom.m.numel() == 0) {
      mom.m = Tensor(p.value.shape());
      mom.v = Tensor(p.value.shape());
    }
    adam_update(p.value.data(), g.data(), mom, hyper, lr);
    updated.push_back(name);
  }
  return updated;
}

}  // namespace srforge
