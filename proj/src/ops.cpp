#include "srforge/ops.hpp"

#include <Eigen/Core>
#include <cmath>

namespace srforge {

namespace {

using RowMatrix = Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ConstRowMap = Eigen::Map<const RowMatrix>;
// Convolution products accumulate in double; only stored activations are float.
using AccMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using AccMap = Eigen::Map<AccMatrix>;

// Unfolds one CxHxW image into a (C*k*k) x (H*W) matrix of zero-padded patches.
void im2col(const float* img, std::int64_t c, std::int64_t h, std::int64_t w, std::int64_t k,
            AccMatrix& col) {
  const std::int64_t pad = (k - 1) / 2;
  col.resize(c * k * k, h * w);
  for (std::int64_t ch = 0; ch < c; ++ch) {
    const float* plane = img + ch * h * w;
    for (std::int64_t ky = 0; ky < k; ++ky) {
      for (std::int64_t kx = 0; kx < k; ++kx) {
        double* row = col.data() + ((ch * k + ky) * k + kx) * h * w;
        for (std::int64_t y = 0; y < h; ++y) {
          const std::int64_t sy = y + ky - pad;
          double* dst = row + y * w;
          if (sy < 0 || sy >= h) {
            std::fill(dst, dst + w, 0.0);
            continue;
          }
          const float* src = plane + sy * w;
          for (std::int64_t x = 0; x < w; ++x) {
            const std::int64_t sx = x + kx - pad;
            dst[x] = (sx >= 0 && sx < w) ? src[sx] : 0.0;
          }
        }
      }
    }
  }
}

// Adjoint of im2col: scatters patch gradients back onto the image.
void col2im_add(const AccMatrix& col, std::int64_t c, std::int64_t h, std::int64_t w,
                std::int64_t k, float* img) {
  const std::int64_t pad = (k - 1) / 2;
  for (std::int64_t ch = 0; ch < c; ++ch) {
    float* plane = img + ch * h * w;
    for (std::int64_t ky = 0; ky < k; ++ky) {
      for (std::int64_t kx = 0; kx < k; ++kx) {
        const double* row = col.data() + ((ch * k + ky) * k + kx) * h * w;
        for (std::int64_t y = 0; y < h; ++y) {
          const std::int64_t sy = y + ky - pad;
          if (sy < 0 || sy >= h) continue;
          const double* src = row + y * w;
          float* dst = plane + sy * w;
          for (std::int64_t x = 0; x < w; ++x) {
            const std::int64_t sx = x + kx - pad;
            if (sx >= 0 && sx < w) dst[sx] += static_cast<float>(src[x]);
          }
        }
      }
    }
  }
}

void check_conv(const Shape& xs, const Shape& ws, const Shape& bs) {
  if (ws.h != ws.w || ws.h % 2 == 0) {
    throw ShapeError("conv2d kernel must be square with odd size, got " + ws.str());
  }
  if (xs.c != ws.c) {
    throw ShapeError("conv2d channel mismatch: input " + xs.str() + ", weight " + ws.str());
  }
  if (xs.h == 0 || xs.w == 0 || xs.n == 0) throw ShapeError("conv2d on empty input " + xs.str());
  if (bs.numel() != ws.n) throw ShapeError("conv2d bias " + bs.str() + " vs weight " + ws.str());
}

Tensor conv_forward(const Tensor& x, const Tensor& weight, const Tensor& bias) {
  check_conv(x.shape(), weight.shape(), bias.shape());
  const auto [n, c, h, w] = x.shape();
  const std::int64_t oc = weight.shape().n;
  const std::int64_t k = weight.shape().h;
  Tensor out({n, oc, h, w});
  const AccMatrix wm = ConstRowMap(weight.data().data(), oc, c * k * k).cast<double>();
  const Eigen::VectorXd b = Eigen::Map<const Eigen::VectorXf>(bias.data().data(), oc).cast<double>();
  AccMatrix col, o;
  for (std::int64_t i = 0; i < n; ++i) {
    im2col(x.data().data() + i * c * h * w, c, h, w, k, col);
    o.noalias() = wm * col;
    o.colwise() += b;
    Eigen::Map<RowMatrix>(out.data().data() + i * oc * h * w, oc, h * w) = o.cast<float>();
  }
  return out;
}

void pixel_shuffle_into(const float* in, float* out, const Shape& s, int r, bool inverse) {
  // s is the shape of the low-resolution (channel-packed) side.
  const std::int64_t oc = s.c / (r * r);
  const std::int64_t oh = s.h * r, ow = s.w * r;
  for (std::int64_t n = 0; n < s.n; ++n) {
    for (std::int64_t c = 0; c < oc; ++c) {
      for (std::int64_t y = 0; y < oh; ++y) {
        for (std::int64_t x = 0; x < ow; ++x) {
          const std::int64_t ic = c * r * r + (y % r) * r + (x % r);
          const std::int64_t src = ((n * s.c + ic) * s.h + y / r) * s.w + x / r;
          const std::int64_t dst = ((n * oc + c) * oh + y) * ow + x;
          if (inverse) {
            out[src] = in[dst];
          } else {
            out[dst] = in[src];
          }
        }
      }
    }
  }
}

void check_shuffle(const Shape& s, int r) {
  if (r < 1) throw ShapeError("pixel_shuffle factor must be positive");
  if (s.c % (r * r) != 0) {
    throw ShapeError("pixel_shuffle: channels " + std::to_string(s.c) + " not divisible by " +
                     std::to_string(r * r));
  }
}

void add_into(std::span<float> dst, std::span<const float> src) {
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += src[i];
}

}  // namespace

void ConvParams::validate() const {
  const Shape& ws = weight.shape();
  if (ws.h != ws.w || ws.h % 2 == 0) throw ShapeError("kernel must be square and odd: " + ws.str());
  if (bias.numel() != ws.n) throw ShapeError("bias length does not match output channels");
}

Tensor conv2d(const Tensor& x, const ConvParams& p) { return conv_forward(x, p.weight, p.bias); }

Tensor relu(const Tensor& x) {
  Tensor out = x;
  for (float& v : out.data()) v = v > 0.0f ? v : 0.0f;
  return out;
}

Tensor add(const Tensor& x, const Tensor& y) {
  require_same_shape(x, y, "add");
  Tensor out = x;
  add_into(out.data(), y.data());
  return out;
}

Tensor scale(const Tensor& x, float s) {
  Tensor out = x;
  if (s != 1.0f) {
    for (float& v : out.data()) v *= s;
  }
  return out;
}

Tensor pixel_shuffle(const Tensor& x, int r) {
  const Shape s = x.shape();
  check_shuffle(s, r);
  Tensor out({s.n, s.c / (r * r), s.h * r, s.w * r});
  pixel_shuffle_into(x.data().data(), out.data().data(), s, r, false);
  return out;
}

Tensor pixel_unshuffle(const Tensor& x, int r) {
  const Shape s = x.shape();
  if (r < 1 || s.h % r != 0 || s.w % r != 0) {
    throw ShapeError("pixel_unshuffle: spatial dims " + s.str() + " not divisible by " +
                     std::to_string(r));
  }
  const Shape packed{s.n, s.c * r * r, s.h / r, s.w / r};
  Tensor out(packed);
  pixel_shuffle_into(x.data().data(), out.data().data(), packed, r, true);
  return out;
}

Tensor channel_offset(const Tensor& x, std::span<const float> offsets) {
  const Shape s = x.shape();
  if (static_cast<std::int64_t>(offsets.size()) != s.c) {
    throw ShapeError("channel_offset: " + std::to_string(offsets.size()) + " offsets for " +
                     std::to_string(s.c) + " channels");
  }
  Tensor out = x;
  auto d = out.data();
  for (std::int64_t n = 0; n < s.n; ++n) {
    for (std::int64_t c = 0; c < s.c; ++c) {
      float* p = d.data() + (n * s.c + c) * s.plane();
      for (std::int64_t i = 0; i < s.plane(); ++i) p[i] += offsets[static_cast<std::size_t>(c)];
    }
  }
  return out;
}

Var conv2d(Tape& tape, Var x, Var weight, Var bias) {
  Tensor out = conv_forward(tape.value(x), tape.value(weight), tape.value(bias));
  return tape.record(std::move(out), {x, weight, bias}, [x, weight, bias](Tape& t, const Tensor& g) {
    const Tensor& xv = t.value(x);
    const Tensor& wv = t.value(weight);
    const auto [n, c, h, w] = xv.shape();
    const std::int64_t oc = wv.shape().n;
    const std::int64_t k = wv.shape().h;
    const bool need_x = t.requires_grad(x);
    const bool need_w = t.requires_grad(weight);
    const bool need_b = t.requires_grad(bias);
    AccMatrix col, go, dcol;
    AccMatrix dw = AccMatrix::Zero(oc, c * k * k);
    const AccMatrix wm = need_x ? AccMatrix(ConstRowMap(wv.data().data(), oc, c * k * k).cast<double>()) : AccMatrix();
    std::vector<double> db(static_cast<std::size_t>(oc), 0.0);
    for (std::int64_t i = 0; i < n; ++i) {
      go = ConstRowMap(g.data().data() + i * oc * h * w, oc, h * w).cast<double>();
      if (need_w) {
        im2col(xv.data().data() + i * c * h * w, c, h, w, k, col);
        dw.noalias() += go * col.transpose();
      }
      if (need_b) {
        for (std::int64_t o = 0; o < oc; ++o) {
          const double* row = go.data() + o * h * w;
          double acc = 0.0;
          for (std::int64_t j = 0; j < h * w; ++j) acc += row[j];
          db[static_cast<std::size_t>(o)] += acc;
        }
      }
      if (need_x) {
        dcol.noalias() = wm.transpose() * go;
        col2im_add(dcol, c, h, w, k, t.grad_buffer(x).data() + i * c * h * w);
      }
    }
    if (need_w) {
      auto gw = t.grad_buffer(weight);
      for (std::size_t j = 0; j < gw.size(); ++j) gw[j] += static_cast<float>(dw.data()[j]);
    }
    if (need_b) {
      auto gb = t.grad_buffer(bias);
      for (std::size_t o = 0; o < db.size(); ++o) gb[o] += static_cast<float>(db[o]);
    }
  });
}

Var relu(Tape& tape, Var x) {
  tape.note_kinks(tape.value(x).data());
  return tape.record(relu(tape.value(x)), {x}, [x](Tape& t, const Tensor& g) {
    const auto xv = t.value(x).data();
    auto gx = t.grad_buffer(x);
    const auto gv = g.data();
    for (std::size_t i = 0; i < gx.size(); ++i) {
      if (xv[i] > 0.0f) gx[i] += gv[i];
    }
  });
}

Var add(Tape& tape, Var x, Var y) {
  return tape.record(add(tape.value(x), tape.value(y)), {x, y}, [x, y](Tape& t, const Tensor& g) {
    if (t.requires_grad(x)) add_into(t.grad_buffer(x), g.data());
    if (t.requires_grad(y)) add_into(t.grad_buffer(y), g.data());
  });
}

Var mul(Tape& tape, Var x, Var y) {
  const Tensor& xv = tape.value(x);
  const Tensor& yv = tape.value(y);
  require_same_shape(xv, yv, "mul");
  Tensor out = xv;
  for (std::int64_t i = 0; i < out.numel(); ++i) out[i] *= yv[i];
  return tape.record(std::move(out), {x, y}, [x, y](Tape& t, const Tensor& g) {
    const auto xd = t.value(x).data();
    const auto yd = t.value(y).data();
    if (t.requires_grad(x)) {
      auto gx = t.grad_buffer(x);
      for (std::size_t i = 0; i < gx.size(); ++i) gx[i] += g.data()[i] * yd[i];
    }
    if (t.requires_grad(y)) {
      auto gy = t.grad_buffer(y);
      for (std::size_t i = 0; i < gy.size(); ++i) gy[i] += g.data()[i] * xd[i];
    }
  });
}

Var scale(Tape& tape, Var x, float s) {
  return tape.record(scale(tape.value(x), s), {x}, [x, s](Tape& t, const Tensor& g) {
    auto gx = t.grad_buffer(x);
    for (std::size_t i = 0; i < gx.size(); ++i) gx[i] += s * g.data()[i];
  });
}

Var pixel_shuffle(Tape& tape, Var x, int r) {
  return tape.record(pixel_shuffle(tape.value(x), r), {x}, [x, r](Tape& t, const Tensor& g) {
    add_into(t.grad_buffer(x), pixel_unshuffle(g, r).data());
  });
}

Var channel_offset(Tape& tape, Var x, std::span<const float> offsets) {
  return tape.record(channel_offset(tape.value(x), offsets), {x}, [x](Tape& t, const Tensor& g) {
    add_into(t.grad_buffer(x), g.data());
  });
}

Var sum(Tape& tape, Var x) {
  double acc = 0.0;
  for (float v : tape.value(x).data()) acc += v;
  return tape.record_scalar(acc, {x}, [x](Tape& t, const Tensor& g) {
    auto gx = t.grad_buffer(x);
    for (float& v : gx) v += g[0];
  });
}

namespace {

enum class Norm { l1, l2 };

Var pointwise_loss(Tape& tape, Var pred, Var target, Norm norm) {
  const Tensor& p = tape.value(pred);
  const Tensor& q = tape.value(target);
  require_same_shape(p, q, norm == Norm::l1 ? "l1_loss" : "l2_loss");
  if (p.numel() == 0) throw ShapeError("loss over an empty tensor");
  double acc = 0.0;
  for (std::int64_t i = 0; i < p.numel(); ++i) {
    const double d = static_cast<double>(p[i]) - q[i];
    acc += norm == Norm::l1 ? std::abs(d) : d * d;
  }
  const double count = static_cast<double>(p.numel());
  return tape.record_scalar(acc / count, {pred, target},
                            [pred, target, norm, count](Tape& t, const Tensor& g) {
    const Tensor& pv = t.value(pred);
    const Tensor& qv = t.value(target);
    const double up = g[0] / count;
    const bool need_p = t.requires_grad(pred);
    const bool need_q = t.requires_grad(target);
    std::span<float> gp = need_p ? t.grad_buffer(pred) : std::span<float>{};
    std::span<float> gq = need_q ? t.grad_buffer(target) : std::span<float>{};
    for (std::int64_t i = 0; i < pv.numel(); ++i) {
      const double d = static_cast<double>(pv[i]) - qv[i];
      // Subgradient of |d| at 0 is taken as 0.
      const double dd = norm == Norm::l1 ? (d > 0 ? 1.0 : (d < 0 ? -1.0 : 0.0)) : 2.0 * d;
      const auto gi = static_cast<float>(up * dd);
      if (need_p) gp[static_cast<std::size_t>(i)] += gi;
      if (need_q) gq[static_cast<std::size_t>(i)] -= gi;
    }
  });
}

}  // namespace

Var l1_loss(Tape& tape, Var pred, Var target) { return pointwise_loss(tape, pred, target, Norm::l1); }

Var l2_loss(Tape& tape, Var pred, Var target) { return pointwise_loss(tape, pred, target, Norm::l2); }

}  // namespace srforge
