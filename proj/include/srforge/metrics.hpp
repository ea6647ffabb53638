#pragma once

#include <limits>

#include <Eigen/Core>

#include "srforge/image.hpp"

namespace srforge {

/// PSNR of identical inputs. Never averaged into aggregates.
inline constexpr double kPsnrInfinity = std::numeric_limits<double>::infinity();

/// BT.601 studio-swing luma of 0-255 RGB planes, in [16, 235].
template <typename R, typename G, typename B>
auto rgb_to_y(const Eigen::MatrixBase<R>& r, const Eigen::MatrixBase<G>& g,
              const Eigen::MatrixBase<B>& b) {
  using S = typename R::Scalar;
  return ((S(65.481) * r.array() + S(128.553) * g.array() + S(24.966) * b.array()) / S(255) + S(16))
      .matrix();
}

Plane rgb_to_y(const Image& img);

/// Drops `pixels` rows and columns from each side.
template <typename Derived>
auto crop_border(const Eigen::MatrixBase<Derived>& plane, int pixels) {
  if (pixels < 0 || 2 * static_cast<Eigen::Index>(pixels) >= plane.rows() ||
      2 * static_cast<Eigen::Index>(pixels) >= plane.cols()) {
    throw UsageError("crop_border: cannot remove " + std::to_string(pixels) + " px from a " +
                     std::to_string(plane.rows()) + "x" + std::to_string(plane.cols()) + " plane");
  }
  return plane.block(pixels, pixels, plane.rows() - 2 * pixels, plane.cols() - 2 * pixels);
}

double mse(const Plane& a, const Plane& b);
double psnr_from_mse(double mse, double peak = 255.0);
double ssim_plane(const Plane& a, const Plane& b, double data_range = 255.0);

template <typename A, typename B>
double psnr(const Eigen::MatrixBase<A>& a, const Eigen::MatrixBase<B>& b, double peak = 255.0) {
  return psnr_from_mse(mse(a.template cast<double>(), b.template cast<double>()), peak);
}

/// Mean SSIM over the valid region of an 11x11 Gaussian window (sigma 1.5),
/// K1 = 0.01, K2 = 0.03.
template <typename A, typename B>
double ssim(const Eigen::MatrixBase<A>& a, const Eigen::MatrixBase<B>& b, double data_range = 255.0) {
  return ssim_plane(a.template cast<double>(), b.template cast<double>(), data_range);
}

}  // namespace srforge
