#include "srforge/tensor.hpp"

#include <algorithm>
#include <cstring>
#include <sstream>

namespace srforge {

std::string Shape::str() const {
  std::ostringstream os;
  os << '(' << n << ", " << c << ", " << h << ", " << w << ')';
  return os.str();
}

namespace {
void check_shape(const Shape& s) {
  if (s.n < 0 || s.c < 0 || s.h < 0 || s.w < 0) {
    throw ShapeError("negative tensor extent " + s.str());
  }
}
}  // namespace

Tensor::Tensor(Shape shape, float fill) : shape_(shape) {
  check_shape(shape);
  data_.assign(static_cast<std::size_t>(shape.numel()), fill);
}

Tensor::Tensor(Shape shape, std::vector<float> values) : shape_(shape), data_(std::move(values)) {
  check_shape(shape);
  if (static_cast<std::int64_t>(data_.size()) != shape.numel()) {
    throw ShapeError("tensor data length " + std::to_string(data_.size()) +
                     " does not match shape " + shape.str());
  }
}

void Tensor::enable_grad() {
  if (!grad_) grad_.emplace(data_.size(), 0.0f);
}

void Tensor::zero_grad() {
  if (grad_) std::fill(grad_->begin(), grad_->end(), 0.0f);
}

std::span<float> Tensor::grad() {
  if (!grad_) throw UsageError("tensor has no gradient slot");
  return *grad_;
}

std::span<const float> Tensor::grad() const {
  if (!grad_) throw UsageError("tensor has no gradient slot");
  return *grad_;
}

Tensor Tensor::slice(std::int64_t i) const {
  if (i < 0 || i >= shape_.n) throw ShapeError("batch index out of range");
  const auto stride = shape_.c * shape_.h * shape_.w;
  std::vector<float> v(data_.begin() + i * stride, data_.begin() + (i + 1) * stride);
  return Tensor({1, shape_.c, shape_.h, shape_.w}, std::move(v));
}

Tensor Tensor::reshaped(Shape shape) const {
  if (shape.numel() != shape_.numel()) {
    throw ShapeError("cannot reshape " + shape_.str() + " to " + shape.str());
  }
  return Tensor(shape, data_);
}

bool Tensor::bit_equal(const Tensor& other) const {
  return shape_ == other.shape_ &&
         (data_.empty() ||
          std::memcmp(data_.data(), other.data_.data(), data_.size() * sizeof(float)) == 0);
}

Tensor stack(std::span<const Tensor> items) {
  if (items.empty()) throw ShapeError("stack of zero tensors");
  const Shape s = items.front().shape();
  if (s.n != 1) throw ShapeError("stack expects batch-1 tensors");
  std::vector<float> out;
  out.reserve(static_cast<std::size_t>(s.numel()) * items.size());
  for (const auto& t : items) {
    if (!(t.shape() == s)) throw ShapeError("stack shape mismatch " + t.shape().str() + " vs " + s.str());
    out.insert(out.end(), t.values().begin(), t.values().end());
  }
  return Tensor({static_cast<std::int64_t>(items.size()), s.c, s.h, s.w}, std::move(out));
}

void require_same_shape(const Tensor& a, const Tensor& b, const char* what) {
  if (!(a.shape() == b.shape())) {
    throw ShapeError(std::string(what) + ": shape mismatch " + a.shape().str() + " vs " +
                     b.shape().str());
  }
}

}  // namespace srforge
