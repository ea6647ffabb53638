#include "srforge/ensemble.hpp"

#include <vector>

namespace srforge {

Tensor self_ensemble(const Upscaler& model, const Tensor& lr,
                     std::span<const GeomTransform> transforms) {
  if (transforms.empty()) throw UsageError("self_ensemble needs at least one transform");
  std::vector<double> acc;
  Shape out_shape{};
  for (const GeomTransform& t : transforms) {
    const Tensor sr = t.inverse().apply(model(t.apply(lr)));
    if (acc.empty()) {
      out_shape = sr.shape();
      acc.assign(static_cast<std::size_t>(sr.numel()), 0.0);
    } else if (!(sr.shape() == out_shape)) {
      throw ShapeError("self_ensemble: outputs disagree in shape");
    }
    for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += sr.data()[i];
  }
  Tensor out(out_shape);
  const double count = static_cast<double>(transforms.size());
  for (std::size_t i = 0; i < acc.size(); ++i) out.data()[i] = static_cast<float>(acc[i] / count);
  return out;
}

Tensor self_ensemble(const Upscaler& model, const Tensor& lr) {
  const auto all = GeomTransform::all();
  return self_ensemble(model, lr, all);
}

Upscaler as_upscaler(const Model& model, int scale) {
  return [&model, scale](const Tensor& x) { return model.infer(x, scale); };
}

}  // namespace srforge
