#pragma once

#include <array>
#include <span>

#include "srforge/autograd.hpp"
#include "srforge/tensor.hpp"

namespace srforge {

/// Stride-1 "same" convolution parameters. Weight is (out, in, k, k), bias is (out, 1, 1, 1).
struct ConvParams {
  Tensor weight;
  Tensor bias;

  std::int64_t out_channels() const { return weight.shape().n; }
  std::int64_t in_channels() const { return weight.shape().c; }
  std::int64_t kernel() const { return weight.shape().h; }
  std::int64_t padding() const { return (kernel() - 1) / 2; }
  void validate() const;
};

// Plain (untracked) kernels. conv2d is cross-correlation with zero padding (k-1)/2.
Tensor conv2d(const Tensor& x, const ConvParams& p);
Tensor relu(const Tensor& x);
Tensor add(const Tensor& x, const Tensor& y);
Tensor scale(const Tensor& x, float s);
Tensor pixel_shuffle(const Tensor& x, int r);
Tensor pixel_unshuffle(const Tensor& x, int r);
Tensor channel_offset(const Tensor& x, std::span<const float> offsets);

// Tape-tracked versions.
Var conv2d(Tape& tape, Var x, Var weight, Var bias);
Var relu(Tape& tape, Var x);
Var add(Tape& tape, Var x, Var y);
Var mul(Tape& tape, Var x, Var y);
Var scale(Tape& tape, Var x, float s);
Var pixel_shuffle(Tape& tape, Var x, int r);
/// Adds offsets[c] to every element of channel c.
Var channel_offset(Tape& tape, Var x, std::span<const float> offsets);

/// Scalar reductions, accumulated in double.
Var sum(Tape& tape, Var x);
Var l1_loss(Tape& tape, Var pred, Var target);
Var l2_loss(Tape& tape, Var pred, Var target);

}  // namespace srforge
