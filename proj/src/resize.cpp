#include "srforge/resize.hpp"

#include <cmath>
#include <vector>

namespace srforge {

double cubic_kernel(double x) {
  const double a = std::abs(x);
  const double a2 = a * a;
  const double a3 = a2 * a;
  if (a <= 1.0) return 1.5 * a3 - 2.5 * a2 + 1.0;
  if (a <= 2.0) return -0.5 * a3 + 2.5 * a2 - 4.0 * a + 2.0;
  return 0.0;
}

ResampleMatrix resize_weights(int in_len, int out_len, bool antialias) {
  if (in_len <= 0 || out_len <= 0) throw UsageError("resize_weights: lengths must be positive");
  const double scale = static_cast<double>(out_len) / in_len;
  const bool widen = antialias && scale < 1.0;
  const double kernel_width = widen ? 4.0 / scale : 4.0;
  const int taps = static_cast<int>(std::ceil(kernel_width)) + 2;
  const int period = 2 * in_len;

  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(static_cast<std::size_t>(out_len) * taps);
  std::vector<double> w(static_cast<std::size_t>(taps));
  for (int i = 0; i < out_len; ++i) {
    // One-based coordinates, as in the reference formulation.
    const double u = (i + 1) / scale + 0.5 * (1.0 - 1.0 / scale);
    const int left = static_cast<int>(std::floor(u - kernel_width / 2.0));
    double total = 0.0;
    for (int t = 0; t < taps; ++t) {
      const double d = u - (left + t);
      w[t] = widen ? scale * cubic_kernel(scale * d) : cubic_kernel(d);
      total += w[t];
    }
    for (int t = 0; t < taps; ++t) {
      if (w[t] == 0.0) continue;
      // Mirror the one-based index into [1, in_len].
      int j = ((left + t - 1) % period + period) % period;
      if (j >= in_len) j = period - 1 - j;
      triplets.emplace_back(i, j, w[t] / total);
    }
  }
  ResampleMatrix m(out_len, in_len);
  m.setFromTriplets(triplets.begin(), triplets.end());
  return m;
}

Tensor bicubic_resize(const Tensor& x, int out_w, int out_h, bool antialias) {
  const Shape s = x.shape();
  Tensor out({s.n, s.c, out_h, out_w});
  for (std::int64_t n = 0; n < s.n; ++n) {
    for (std::int64_t c = 0; c < s.c; ++c) {
      Eigen::Map<const PlaneT<float>> src(x.data().data() + (n * s.c + c) * s.plane(), s.h, s.w);
      Eigen::Map<PlaneT<float>> dst(out.data().data() + (n * s.c + c) * out_h * out_w, out_h, out_w);
      dst = bicubic_resize(src, out_h, out_w, antialias);
    }
  }
  return out;
}

Image bicubic_resize(const Image& img, int out_w, int out_h, bool antialias) {
  const auto planes = to_planes(img);
  std::array<Plane, 3> out;
  for (int c = 0; c < 3; ++c) out[c] = bicubic_resize(planes[c], out_h, out_w, antialias);
  return from_planes(out);
}

}  // namespace srforge
