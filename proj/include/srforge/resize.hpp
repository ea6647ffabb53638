#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "srforge/image.hpp"
#include "srforge/tensor.hpp"

namespace srforge {

using ResampleMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

/// Cubic convolution kernel with a = -0.5 (support [-2, 2]).
double cubic_kernel(double x);

/// out_len x in_len interpolation matrix following MATLAB imresize: output pixel i
/// samples input coordinate (i + 0.5) / scale - 0.5, the kernel is stretched by
/// 1 / scale when shrinking with antialiasing, each row is normalized to sum to 1,
/// and taps outside the image are mirrored back (symmetric padding).
ResampleMatrix resize_weights(int in_len, int out_len, bool antialias = true);

/// Separable bicubic resize of a single plane; returns out_rows x out_cols in the
/// plane's scalar type.
template <typename Derived>
PlaneT<typename Derived::Scalar> bicubic_resize(const Eigen::MatrixBase<Derived>& plane,
                                                int out_rows, int out_cols, bool antialias = true) {
  if (out_rows <= 0 || out_cols <= 0) throw UsageError("bicubic_resize: target size must be positive");
  if (plane.rows() == 0 || plane.cols() == 0) throw UsageError("bicubic_resize: empty source");
  const ResampleMatrix rows = resize_weights(static_cast<int>(plane.rows()), out_rows, antialias);
  const ResampleMatrix cols = resize_weights(static_cast<int>(plane.cols()), out_cols, antialias);
  const Plane src = plane.template cast<double>();
  const Plane vertical = rows * src;
  const Plane out = (cols * vertical.transpose()).transpose();
  return out.template cast<typename Derived::Scalar>();
}

/// Float resize of every (n, c) plane of a tensor.
Tensor bicubic_resize(const Tensor& x, int out_w, int out_h, bool antialias = true);
/// Resizes in floating point and quantizes once on output.
Image bicubic_resize(const Image& img, int out_w, int out_h, bool antialias = true);

}  // namespace srforge
