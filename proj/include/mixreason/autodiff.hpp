#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "mixreason/tensor.hpp"

namespace mixreason {

class Tape;

// Handle to a node recorded on a Tape.
struct Var {
  Tape* tape = nullptr;
  std::size_t id = 0;

  const Tensor& value() const;
};

// Gradients of a scalar loss, keyed by parameter slot.
using Gradients = std::map<std::size_t, Tensor>;

// Reverse-mode tape. Nodes are appended in evaluation order, so the node list
// is already topologically sorted; backward walks it once in reverse.
// Leaves can reference caller-owned tensors, which must outlive the tape.
class Tape {
 public:
  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  Var constant(Tensor value);
  Var constant_ref(const Tensor& value);
  // A trainable leaf; its gradient is reported under `slot`.
  Var parameter(const Tensor& value, std::size_t slot);

  const Tensor& value(Var v) const;
  std::size_t size() const { return nodes_.size(); }

  // Throws NonScalarLoss unless loss is 1 x 1.
  Gradients backward(Var loss);

 private:
  enum class Op : std::uint8_t {
    Leaf,
    MatMul,
    Add,
    AddRow,
    Sub,
    Mul,
    Scale,
    Tanh,
    Sigmoid,
    RowSoftmax,
    Embedding,
    ConcatRows,
    ConcatCols,
    Transpose,
    Sum,
    CrossEntropy,
  };

  struct Node {
    Op op = Op::Leaf;
    std::size_t a = 0;
    std::size_t b = 0;
    std::vector<std::size_t> inputs;   // concat
    std::vector<std::int32_t> ids;     // embedding rows / cross-entropy targets
    double scalar = 0.0;               // scale factor
    Tensor owned;
    const Tensor* ref = nullptr;
    Tensor aux;                        // cached softmax for cross-entropy
    std::int64_t slot = -1;
    bool needs_grad = false;
  };

  Var push(Node node);
  const Tensor& val(std::size_t id) const;
  bool ng(std::size_t id) const { return nodes_[id].needs_grad; }

  std::vector<Node> nodes_;

  friend Var matmul(Var a, Var b);
  friend Var add(Var a, Var b);
  friend Var sub(Var a, Var b);
  friend Var mul(Var a, Var b);
  friend Var scale(Var a, double s);
  friend Var tanh(Var a);
  friend Var sigmoid(Var a);
  friend Var row_softmax(Var a);
  friend Var embedding_lookup(Var table, std::span<const std::int32_t> ids);
  friend Var concat(std::span<const Var> parts, int axis);
  friend Var transpose(Var a);
  friend Var sum(Var a);
  friend Var cross_entropy(Var logits, std::span<const std::int32_t> targets);
};

Var matmul(Var a, Var b);
// Elementwise; b may also be a 1 x n row broadcast over the rows of a.
Var add(Var a, Var b);
Var sub(Var a, Var b);
Var mul(Var a, Var b);
Var scale(Var a, double s);
Var tanh(Var a);
Var sigmoid(Var a);
Var row_softmax(Var a);
// Gathers rows of table (V x D) -> ids.size() x D.
Var embedding_lookup(Var table, std::span<const std::int32_t> ids);
// axis 0 stacks rows, axis 1 joins columns.
Var concat(std::span<const Var> parts, int axis);
Var transpose(Var a);
Var sum(Var a);
// Sum over rows of -log softmax(logits[i])[targets[i]]; returns 1 x 1.
Var cross_entropy(Var logits, std::span<const std::int32_t> targets);

}  // namespace mixreason
