#include "srforge/autograd.hpp"

#include <algorithm>

namespace srforge {

const Tape::Node& Tape::node(Var v) const {
  if (v.id >= nodes_.size()) throw UsageError("variable does not belong to this tape");
  return nodes_[v.id];
}

Tape::Node& Tape::node(Var v) {
  if (v.id >= nodes_.size()) throw UsageError("variable does not belong to this tape");
  return nodes_[v.id];
}

Var Tape::constant(Tensor value) {
  Node n;
  n.owned = std::move(value);
  nodes_.push_back(std::move(n));
  return {nodes_.size() - 1};
}

Var Tape::leaf(Tensor value) {
  Node n;
  n.owned = std::move(value);
  n.requires_grad = grad_enabled_;
  nodes_.push_back(std::move(n));
  return {nodes_.size() - 1};
}

Var Tape::parameter(const std::string& name, const Tensor& value) {
  Node n;
  n.ref = &value;
  n.param_name = name;
  n.requires_grad = grad_enabled_;
  nodes_.push_back(std::move(n));
  return {nodes_.size() - 1};
}

Var Tape::record(Tensor value, std::vector<Var> inputs, BackwardFn fn) {
  if (consumed_) throw UsageError("tape already consumed by backward()");
  Node n;
  n.owned = std::move(value);
  if (grad_enabled_) {
    n.requires_grad = std::any_of(inputs.begin(), inputs.end(),
                                  [this](Var v) { return node(v).requires_grad; });
    if (n.requires_grad) {
      n.inputs = std::move(inputs);
      n.backward = std::move(fn);
    }
  }
  nodes_.push_back(std::move(n));
  return {nodes_.size() - 1};
}

Var Tape::record_scalar(double exact, std::vector<Var> inputs, BackwardFn fn) {
  Var v = record(Tensor::scalar(static_cast<float>(exact)), std::move(inputs), std::move(fn));
  nodes_[v.id].exact = exact;
  return v;
}

const Tensor& Tape::value(Var v) const {
  const Node& n = node(v);
  return n.ref ? *n.ref : n.owned;
}

double Tape::scalar(Var v) const {
  const Node& n = node(v);
  if (n.exact) return *n.exact;
  const Tensor& t = value(v);
  if (t.numel() != 1) throw UsageError("scalar() on a non-scalar value " + t.shape().str());
  return t[0];
}

bool Tape::requires_grad(Var v) const { return node(v).requires_grad; }

std::span<float> Tape::grad_buffer(Var v) {
  Node& n = node(v);
  if (n.grad.empty()) n.grad.assign(static_cast<std::size_t>(value(v).numel()), 0.0f);
  return n.grad;
}

Tensor Tape::grad(Var v) const {
  const Node& n = node(v);
  const Shape s = value(v).shape();
  if (n.grad.empty()) return Tensor(s);
  return Tensor(s, n.grad);
}

void Tape::backward(Var loss) {
  if (consumed_) throw UsageError("backward() called twice on the same tape");
  if (!grad_enabled_) throw UsageError("backward() on a tape recorded without gradients");
  if (value(loss).numel() != 1) {
    throw UsageError("backward() needs a scalar loss, got " + value(loss).shape().str());
  }
  grad_buffer(loss)[0] = 1.0f;
  for (std::size_t i = loss.id + 1; i-- > 0;) {
    Node& n = nodes_[i];
    if (!n.backward || n.grad.empty()) continue;
    const Tensor g(n.owned.shape(), n.grad);
    auto fn = std::move(n.backward);
    n.backward = nullptr;
    fn(*this, g);
  }
  consumed_ = true;
}

std::vector<std::string> Tape::bound_parameters() const {
  std::vector<std::string> names;
  for (const auto& n : nodes_) {
    if (!n.param_name.empty()) names.push_back(n.param_name);
  }
  return names;
}

std::map<std::string, Tensor> Tape::parameter_gradients() const {
  std::map<std::string, Tensor> out;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const Node& n = nodes_[i];
    if (n.param_name.empty()) continue;
    Tensor g = grad(Var{i});
    auto [it, inserted] = out.try_emplace(n.param_name, g);
    if (!inserted) {
      auto dst = it->second.data();
      auto src = g.data();
      for (std::size_t k = 0; k < dst.size(); ++k) dst[k] += src[k];
    }
  }
  return out;
}

void Tape::note_kinks(std::span<const float> pre_activation) {
  if (!track_kinks_) return;
  // FNV-1a over one bit per element, packed a byte at a time.
  std::uint8_t byte = 0;
  int bits = 0;
  auto mix = [this](std::uint8_t b) {
    kink_signature_ ^= b;
    kink_signature_ *= 1099511628211ull;
  };
  for (float v : pre_activation) {
    byte = static_cast<std::uint8_t>((byte << 1) | (v > 0.0f));
    if (++bits == 8) {
      mix(byte);
      byte = 0;
      bits = 0;
    }
  }
  mix(byte);
  mix(static_cast<std::uint8_t>(bits));
}

}  // namespace srforge
