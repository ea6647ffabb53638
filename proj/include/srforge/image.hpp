#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <vector>

#include <Eigen/Core>

#include "srforge/tensor.hpp"

namespace srforge {

struct ImageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

template <typename Scalar>
using PlaneT = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Plane = PlaneT<double>;

/// 8-bit RGB image, interleaved row-major.
struct Image {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> rgb;

  Image() = default;
  Image(int w, int h) : width(w), height(h), rgb(static_cast<std::size_t>(w) * h * 3, 0) {}

  std::uint8_t& at(int x, int y, int c) { return rgb[(static_cast<std::size_t>(y) * width + x) * 3 + c]; }
  std::uint8_t at(int x, int y, int c) const {
    return rgb[(static_cast<std::size_t>(y) * width + x) * 3 + c];
  }
  bool operator==(const Image&) const = default;
};

/// Round half away from zero, then clamp to [0, 255].
inline std::uint8_t quantize_sample(double v) {
  const double r = std::round(v);
  return static_cast<std::uint8_t>(r < 0.0 ? 0.0 : (r > 255.0 ? 255.0 : r));
}

Image read_png(const std::filesystem::path& path);
void write_png(const Image& img, const std::filesystem::path& path);

/// 1x3xHxW float tensor in the 0-255 domain.
Tensor to_tensor(const Image& img);
/// Quantizes batch item 0 of a 3-channel tensor.
Image to_image(const Tensor& t);

std::array<Plane, 3> to_planes(const Image& img);
Image from_planes(const std::array<Plane, 3>& planes);
Plane tensor_plane(const Tensor& t, std::int64_t channel, std::int64_t item = 0);

/// Sub-rectangle [x0, x0 + w) x [y0, y0 + h).
Image crop(const Image& img, int x0, int y0, int w, int h);

}  // namespace srforge
