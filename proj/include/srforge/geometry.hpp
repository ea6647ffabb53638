#pragma once

#include <array>
#include <string>

#include <Eigen/Core>

#include "srforge/tensor.hpp"

namespace srforge {

/// Element of the dihedral group of the square: an optional horizontal flip
/// followed by `rotations` counter-clockwise quarter turns.
class GeomTransform {
 public:
  constexpr GeomTransform() = default;
  constexpr GeomTransform(int rotations, bool flip) : rot_(((rotations % 4) + 4) % 4), flip_(flip) {}

  /// Index in [0, 8): rotations + 4 * flip.
  static GeomTransform from_index(int index);
  static std::array<GeomTransform, 8> all();

  int index() const { return rot_ + (flip_ ? 4 : 0); }
  int rotations() const { return rot_; }
  bool flipped() const { return flip_; }

  GeomTransform inverse() const;
  /// `*this` applied after `first`.
  GeomTransform after(GeomTransform first) const;

  bool operator==(const GeomTransform&) const = default;
  std::string name() const;

  /// Transforms the spatial axes of every (n, c) plane.
  Tensor apply(const Tensor& x) const;

  template <typename Derived>
  Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> apply(
      const Eigen::MatrixBase<Derived>& plane) const {
    using Out = Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
    Out m = flip_ ? Out(plane.rowwise().reverse()) : Out(plane);
    for (int i = 0; i < rot_; ++i) {
      Out r = m.transpose().colwise().reverse();
      m = std::move(r);
    }
    return m;
  }

 private:
  int rot_ = 0;
  bool flip_ = false;
};

}  // namespace srforge
