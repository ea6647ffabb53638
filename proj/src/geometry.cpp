#include "srforge/geometry.hpp"

namespace srforge {

GeomTransform GeomTransform::from_index(int index) {
  if (index < 0 || index >= 8) throw UsageError("transform index out of range");
  return GeomTransform(index % 4, index >= 4);
}

std::array<GeomTransform, 8> GeomTransform::all() {
  std::array<GeomTransform, 8> out;
  for (int i = 0; i < 8; ++i) out[static_cast<std::size_t>(i)] = from_index(i);
  return out;
}

GeomTransform GeomTransform::inverse() const {
  // Reflections are involutions; pure rotations invert by turning back.
  return flip_ ? *this : GeomTransform(4 - rot_, false);
}

GeomTransform GeomTransform::after(GeomTransform first) const {
  // R^a F^f R^b F^g = R^(a + (-1)^f b) F^(f xor g)
  const int k = flip_ ? rot_ - first.rot_ : rot_ + first.rot_;
  return GeomTransform(k, flip_ != first.flip_);
}

std::string GeomTransform::name() const {
  std::string s = flip_ ? "flip+" : "";
  return s + "rot" + std::to_string(rot_ * 90);
}

Tensor GeomTransform::apply(const Tensor& x) const {
  const Shape s = x.shape();
  const bool swap = rot_ % 2 == 1;
  const std::int64_t oh = swap ? s.w : s.h;
  const std::int64_t ow = swap ? s.h : s.w;
  Tensor out({s.n, s.c, oh, ow});
  for (std::int64_t n = 0; n < s.n; ++n) {
    for (std::int64_t c = 0; c < s.c; ++c) {
      for (std::int64_t y = 0; y < oh; ++y) {
        for (std::int64_t xx = 0; xx < ow; ++xx) {
          // Walk back through the rotations to a coordinate of the flipped input.
          std::int64_t sy = y, sx = xx, h = oh, w = ow;
          for (int i = 0; i < rot_; ++i) {
            // One CCW turn maps (r, c) of an HxW image to (W-1-c, r); invert it.
            const std::int64_t py = sx;
            const std::int64_t px = h - 1 - sy;
            sy = py;
            sx = px;
            std::swap(h, w);
          }
          if (flip_) sx = s.w - 1 - sx;
          out.at(n, c, y, xx) = x.at(n, c, sy, sx);
        }
      }
    }
  }
  return out;
}

}  // namespace srforge
