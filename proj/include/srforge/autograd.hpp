#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "srforge/tensor.hpp"

namespace srforge {

/// Handle to a value recorded on a Tape.
struct Var {
  static constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();
  std::size_t id = npos;
  bool valid() const { return id != npos; }
};

/// Reverse-mode tape. Nodes are appended in evaluation order, so the recording
/// order is already a topological order of the graph; backward walks it in reverse.
/// A tape is built for one forward pass and consumed by one backward pass.
class Tape {
 public:
  /// Receives the accumulated output gradient; must add into the inputs' buffers.
  using BackwardFn = std::function<void(Tape&, const Tensor& grad_out)>;

  explicit Tape(bool grad_enabled = true) : grad_enabled_(grad_enabled) {}
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  bool grad_enabled() const { return grad_enabled_; }

  Var constant(Tensor value);
  /// Differentiable leaf owned by the tape; read its gradient with grad().
  Var leaf(Tensor value);
  /// Differentiable leaf that references a model parameter (not copied).
  /// The referenced tensor must outlive the tape.
  Var parameter(const std::string& name, const Tensor& value);

  Var record(Tensor value, std::vector<Var> inputs, BackwardFn fn);
  /// Records a scalar whose exact value was reduced in double precision.
  Var record_scalar(double exact, std::vector<Var> inputs, BackwardFn fn);

  const Tensor& value(Var v) const;
  /// Scalar value, preferring the double-precision reduction result.
  double scalar(Var v) const;
  bool requires_grad(Var v) const;

  /// Gradient accumulator for `v`, zero-filled on first access.
  std::span<float> grad_buffer(Var v);
  /// Gradient after backward(); zeros if nothing reached `v`.
  Tensor grad(Var v) const;

  /// Seeds d(loss)/d(loss) = 1 and propagates to every node once, in reverse order.
  void backward(Var loss);
  bool consumed() const { return consumed_; }

  std::size_t size() const { return nodes_.size(); }
  /// Parameter names bound during the forward pass, in binding order.
  std::vector<std::string> bound_parameters() const;
  /// name -> d(loss)/d(parameter); parameters bound more than once are summed.
  std::map<std::string, Tensor> parameter_gradients() const;

  /// When enabled, piecewise-linear ops fold the sign pattern of their inputs into
  /// a signature; two passes with equal signatures lie in the same linear region.
  void track_kinks() { track_kinks_ = true; }
  void note_kinks(std::span<const float> pre_activation);
  std::uint64_t kink_signature() const { return kink_signature_; }

 private:
  struct Node {
    Tensor owned;
    const Tensor* ref = nullptr;
    std::optional<double> exact;
    std::string param_name;
    bool requires_grad = false;
    std::vector<Var> inputs;
    BackwardFn backward;
    std::vector<float> grad;
  };

  const Node& node(Var v) const;
  Node& node(Var v);

  bool grad_enabled_;
  bool consumed_ = false;
  bool track_kinks_ = false;
  std::uint64_t kink_signature_ = 14695981039346656037ull;
  std::vector<Node> nodes_;
};

}  // namespace srforge
