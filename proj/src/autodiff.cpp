#include "mixreason/autodiff.hpp"

#include <algorithm>
#include <cmath>

namespace mixreason {

const Tensor& Var::value() const { return tape->value(*this); }

Var Tape::push(Node node) {
  nodes_.push_back(std::move(node));
  return Var{this, nodes_.size() - 1};
}

const Tensor& Tape::val(std::size_t id) const {
  const Node& n = nodes_[id];
  return n.ref ? *n.ref : n.owned;
}

const Tensor& Tape::value(Var v) const { return val(v.id); }

Var Tape::constant(Tensor value) {
  Node n;
  n.owned = std::move(value);
  return push(std::move(n));
}

Var Tape::constant_ref(const Tensor& value) {
  Node n;
  n.ref = &value;
  return push(std::move(n));
}

Var Tape::parameter(const Tensor& value, std::size_t slot) {
  Node n;
  n.ref = &value;
  n.slot = static_cast<std::int64_t>(slot);
  n.needs_grad = true;
  return push(std::move(n));
}

namespace {

void check_same_tape(Var a, Var b) {
  if (a.tape != b.tape || a.tape == nullptr) throw Error("operands recorded on different tapes");
}

}  // namespace

Var matmul(Var a, Var b) {
  check_same_tape(a, b);
  Tape& t = *a.tape;
  Tape::Node n;
  n.op = Tape::Op::MatMul;
  n.a = a.id;
  n.b = b.id;
  n.owned = matmul(t.val(a.id), t.val(b.id));
  n.needs_grad = t.ng(a.id) || t.ng(b.id);
  return t.push(std::move(n));
}

Var add(Var a, Var b) {
  check_same_tape(a, b);
  Tape& t = *a.tape;
  const Tensor& x = t.val(a.id);
  const Tensor& y = t.val(b.id);
  Tape::Node n;
  n.a = a.id;
  n.b = b.id;
  n.needs_grad = t.ng(a.id) || t.ng(b.id);
  n.owned = x;
  if (x.same_shape(y)) {
    n.op = Tape::Op::Add;
    for (std::size_t i = 0; i < x.size(); ++i) n.owned[i] += y[i];
  } else if (y.rows() == 1 && y.cols() == x.cols()) {
    n.op = Tape::Op::AddRow;
    for (std::size_t r = 0; r < x.rows(); ++r) {
      for (std::size_t c = 0; c < x.cols(); ++c) n.owned(r, c) += y[c];
    }
  } else {
    throw ShapeMismatch("add: incompatible shapes");
  }
  return t.push(std::move(n));
}

Var sub(Var a, Var b) {
  check_same_tape(a, b);
  Tape& t = *a.tape;
  const Tensor& x = t.val(a.id);
  const Tensor& y = t.val(b.id);
  if (!x.same_shape(y)) throw ShapeMismatch("sub: shapes differ");
  Tape::Node n;
  n.op = Tape::Op::Sub;
  n.a = a.id;
  n.b = b.id;
  n.needs_grad = t.ng(a.id) || t.ng(b.id);
  n.owned = x;
  for (std::size_t i = 0; i < x.size(); ++i) n.owned[i] -= y[i];
  return t.push(std::move(n));
}

Var mul(Var a, Var b) {
  check_same_tape(a, b);
  Tape& t = *a.tape;
  const Tensor& x = t.val(a.id);
  const Tensor& y = t.val(b.id);
  if (!x.same_shape(y)) throw ShapeMismatch("mul: shapes differ");
  Tape::Node n;
  n.op = Tape::Op::Mul;
  n.a = a.id;
  n.b = b.id;
  n.needs_grad = t.ng(a.id) || t.ng(b.id);
  n.owned = x;
  for (std::size_t i = 0; i < x.size(); ++i) n.owned[i] *= y[i];
  return t.push(std::move(n));
}

Var scale(Var a, double s) {
  Tape& t = *a.tape;
  Tape::Node n;
  n.op = Tape::Op::Scale;
  n.a = a.id;
  n.scalar = s;
  n.needs_grad = t.ng(a.id);
  n.owned = t.val(a.id);
  for (double& v : n.owned.values()) v *= s;
  return t.push(std::move(n));
}

Var tanh(Var a) {
  Tape& t = *a.tape;
  Tape::Node n;
  n.op = Tape::Op::Tanh;
  n.a = a.id;
  n.needs_grad = t.ng(a.id);
  n.owned = t.val(a.id);
  for (double& v : n.owned.values()) v = std::tanh(v);
  return t.push(std::move(n));
}

Var sigmoid(Var a) {
  Tape& t = *a.tape;
  Tape::Node n;
  n.op = Tape::Op::Sigmoid;
  n.a = a.id;
  n.needs_grad = t.ng(a.id);
  n.owned = t.val(a.id);
  for (double& v : n.owned.values()) v = 1.0 / (1.0 + std::exp(-v));
  return t.push(std::move(n));
}

Var row_softmax(Var a) {
  Tape& t = *a.tape;
  Tape::Node n;
  n.op = Tape::Op::RowSoftmax;
  n.a = a.id;
  n.needs_grad = t.ng(a.id);
  n.owned = softmax_rows(t.val(a.id));
  return t.push(std::move(n));
}

Var embedding_lookup(Var table, std::span<const std::int32_t> ids) {
  Tape& t = *table.tape;
  const Tensor& e = t.val(table.id);
  if (ids.empty()) throw ShapeMismatch("embedding_lookup: no ids");
  Tensor out(ids.size(), e.cols());
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (ids[i] < 0 || static_cast<std::size_t>(ids[i]) >= e.rows()) {
      throw ShapeMismatch("embedding_lookup: id out of range");
    }
    std::copy_n(e.row_span(static_cast<std::size_t>(ids[i])).begin(), e.cols(), out.row_span(i).begin());
  }
  Tape::Node n;
  n.op = Tape::Op::Embedding;
  n.a = table.id;
  n.ids.assign(ids.begin(), ids.end());
  n.needs_grad = t.ng(table.id);
  n.owned = std::move(out);
  return t.push(std::move(n));
}

Var concat(std::span<const Var> parts, int axis) {
  if (parts.empty()) throw ShapeMismatch("concat: no parts");
  Tape& t = *parts.front().tape;
  std::size_t rows = 0, cols = 0;
  bool needs = false;
  for (const Var& p : parts) {
    if (p.tape != &t) throw Error("operands recorded on different tapes");
    const Tensor& v = t.val(p.id);
    needs = needs || t.ng(p.id);
    if (axis == 0) {
      if (cols != 0 && v.cols() != cols) throw ShapeMismatch("concat rows: column counts differ");
      cols = v.cols();
      rows += v.rows();
    } else {
      if (rows != 0 && v.rows() != rows) throw ShapeMismatch("concat cols: row counts differ");
      rows = v.rows();
      cols += v.cols();
    }
  }
  Tensor out(rows, cols);
  std::size_t offset = 0;
  for (const Var& p : parts) {
    const Tensor& v = t.val(p.id);
    for (std::size_t r = 0; r < v.rows(); ++r) {
      for (std::size_t c = 0; c < v.cols(); ++c) {
        if (axis == 0) {
          out(offset + r, c) = v(r, c);
        } else {
          out(r, offset + c) = v(r, c);
        }
      }
    }
    offset += axis == 0 ? v.rows() : v.cols();
  }
  Tape::Node n;
  n.op = axis == 0 ? Tape::Op::ConcatRows : Tape::Op::ConcatCols;
  for (const Var& p : parts) n.inputs.push_back(p.id);
  n.needs_grad = needs;
  n.owned = std::move(out);
  return t.push(std::move(n));
}

Var transpose(Var a) {
  Tape& t = *a.tape;
  const Tensor& x = t.val(a.id);
  Tensor out(x.cols(), x.rows());
  for (std::size_t r = 0; r < x.rows(); ++r) {
    for (std::size_t c = 0; c < x.cols(); ++c) out(c, r) = x(r, c);
  }
  Tape::Node n;
  n.op = Tape::Op::Transpose;
  n.a = a.id;
  n.needs_grad = t.ng(a.id);
  n.owned = std::move(out);
  return t.push(std::move(n));
}

Var sum(Var a) {
  Tape& t = *a.tape;
  double s = 0.0;
  for (double v : t.val(a.id).values()) s += v;
  Tape::Node n;
  n.op = Tape::Op::Sum;
  n.a = a.id;
  n.needs_grad = t.ng(a.id);
  n.owned = Tensor::scalar(s);
  return t.push(std::move(n));
}

Var cross_entropy(Var logits, std::span<const std::int32_t> targets) {
  Tape& t = *logits.tape;
  const Tensor& x = t.val(logits.id);
  if (targets.size() != x.rows()) throw ShapeMismatch("cross_entropy: one target per row required");
  Tape::Node n;
  n.op = Tape::Op::CrossEntropy;
  n.a = logits.id;
  n.ids.assign(targets.begin(), targets.end());
  n.aux = log_softmax_rows(x);
  double loss = 0.0;
  for (std::size_t r = 0; r < x.rows(); ++r) {
    if (targets[r] < 0 || static_cast<std::size_t>(targets[r]) >= x.cols()) {
      throw ShapeMismatch("cross_entropy: target out of range");
    }
    loss -= n.aux(r, static_cast<std::size_t>(targets[r]));
  }
  n.needs_grad = t.ng(logits.id);
  n.owned = Tensor::scalar(loss);
  return t.push(std::move(n));
}

Gradients Tape::backward(Var loss) {
  if (loss.tape != this) throw Error("loss recorded on a different tape");
  if (val(loss.id).rows() != 1 || val(loss.id).cols() != 1) {
    throw NonScalarLoss("backward requires a 1 x 1 loss");
  }
  std::vector<Tensor> grads(nodes_.size());
  auto grad_of = [&](std::size_t id) -> Tensor& {
    if (grads[id].empty()) grads[id] = Tensor(val(id).rows(), val(id).cols());
    return grads[id];
  };
  grad_of(loss.id)[0] = 1.0;

  Gradients out;
  for (std::size_t i = loss.id + 1; i-- > 0;) {
    const Node& n = nodes_[i];
    if (!n.needs_grad || grads[i].empty()) continue;
    const Tensor& g = grads[i];
    const Tensor& y = val(i);
    switch (n.op) {
      case Op::Leaf:
        if (n.slot >= 0) {
          auto [it, fresh] = out.try_emplace(static_cast<std::size_t>(n.slot), g);
          if (!fresh) {
            for (std::size_t k = 0; k < g.size(); ++k) it->second[k] += g[k];
          }
        }
        break;
      case Op::MatMul: {
        const Tensor& A = val(n.a);
        const Tensor& B = val(n.b);
        if (ng(n.a)) {
          Tensor& dA = grad_of(n.a);
          for (std::size_t r = 0; r < A.rows(); ++r) {
            for (std::size_t p = 0; p < A.cols(); ++p) {
              double s = 0.0;
              for (std::size_t c = 0; c < B.cols(); ++c) s += g(r, c) * B(p, c);
              dA(r, p) += s;
            }
          }
        }
        if (ng(n.b)) {
          Tensor& dB = grad_of(n.b);
          for (std::size_t r = 0; r < A.rows(); ++r) {
            for (std::size_t p = 0; p < A.cols(); ++p) {
              const double a = A(r, p);
              double* drow = &dB(p, 0);
              for (std::size_t c = 0; c < B.cols(); ++c) drow[c] += a * g(r, c);
            }
          }
        }
        break;
      }
      case Op::Add:
      case Op::Sub: {
        const double sign = n.op == Op::Sub ? -1.0 : 1.0;
        if (ng(n.a)) {
          Tensor& d = grad_of(n.a);
          for (std::size_t k = 0; k < g.size(); ++k) d[k] += g[k];
        }
        if (ng(n.b)) {
          Tensor& d = grad_of(n.b);
          for (std::size_t k = 0; k < g.size(); ++k) d[k] += sign * g[k];
        }
        break;
      }
      case Op::AddRow: {
        if (ng(n.a)) {
          Tensor& d = grad_of(n.a);
          for (std::size_t k = 0; k < g.size(); ++k) d[k] += g[k];
        }
        if (ng(n.b)) {
          Tensor& d = grad_of(n.b);
          for (std::size_t r = 0; r < g.rows(); ++r) {
            for (std::size_t c = 0; c < g.cols(); ++c) d[c] += g(r, c);
          }
        }
        break;
      }
      case Op::Mul: {
        const Tensor& A = val(n.a);
        const Tensor& B = val(n.b);
        if (ng(n.a)) {
          Tensor& d = grad_of(n.a);
          for (std::size_t k = 0; k < g.size(); ++k) d[k] += g[k] * B[k];
        }
        if (ng(n.b)) {
          Tensor& d = grad_of(n.b);
          for (std::size_t k = 0; k < g.size(); ++k) d[k] += g[k] * A[k];
        }
        break;
      }
      case Op::Scale: {
        Tensor& d = grad_of(n.a);
        for (std::size_t k = 0; k < g.size(); ++k) d[k] += n.scalar * g[k];
        break;
      }
      case Op::Tanh: {
        Tensor& d = grad_of(n.a);
        for (std::size_t k = 0; k < g.size(); ++k) d[k] += g[k] * (1.0 - y[k] * y[k]);
        break;
      }
      case Op::Sigmoid: {
        Tensor& d = grad_of(n.a);
        for (std::size_t k = 0; k < g.size(); ++k) d[k] += g[k] * y[k] * (1.0 - y[k]);
        break;
      }
      case Op::RowSoftmax: {
        Tensor& d = grad_of(n.a);
        for (std::size_t r = 0; r < y.rows(); ++r) {
          double dot = 0.0;
          for (std::size_t c = 0; c < y.cols(); ++c) dot += g(r, c) * y(r, c);
          for (std::size_t c = 0; c < y.cols(); ++c) d(r, c) += y(r, c) * (g(r, c) - dot);
        }
        break;
      }
      case Op::Embedding: {
        Tensor& d = grad_of(n.a);
        for (std::size_t r = 0; r < n.ids.size(); ++r) {
          auto dst = d.row_span(static_cast<std::size_t>(n.ids[r]));
          auto src = g.row_span(r);
          for (std::size_t c = 0; c < src.size(); ++c) dst[c] += src[c];
        }
        break;
      }
      case Op::ConcatRows:
      case Op::ConcatCols: {
        std::size_t offset = 0;
        for (std::size_t in : n.inputs) {
          const Tensor& v = val(in);
          if (ng(in)) {
            Tensor& d = grad_of(in);
            for (std::size_t r = 0; r < v.rows(); ++r) {
              for (std::size_t c = 0; c < v.cols(); ++c) {
                d(r, c) += n.op == Op::ConcatRows ? g(offset + r, c) : g(r, offset + c);
              }
            }
          }
          offset += n.op == Op::ConcatRows ? v.rows() : v.cols();
        }
        break;
      }
      case Op::Transpose: {
        Tensor& d = grad_of(n.a);
        for (std::size_t r = 0; r < g.rows(); ++r) {
          for (std::size_t c = 0; c < g.cols(); ++c) d(c, r) += g(r, c);
        }
        break;
      }
      case Op::Sum: {
        Tensor& d = grad_of(n.a);
        for (double& v : d.values()) v += g[0];
        break;
      }
      case Op::CrossEntropy: {
        Tensor& d = grad_of(n.a);
        for (std::size_t r = 0; r < n.aux.rows(); ++r) {
          for (std::size_t c = 0; c < n.aux.cols(); ++c) d(r, c) += g[0] * std::exp(n.aux(r, c));
          d(r, static_cast<std::size_t>(n.ids[r])) -= g[0];
        }
        break;
      }
    }
  }
  return out;
}

}  // namespace mixreason
