#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "mixreason/errors.hpp"

namespace mixreason {

// Dense row-major matrix of doubles. Vectors are 1 x n rows and scalars are
// 1 x 1; nothing in the model needs higher rank.
class Tensor {
 public:
  Tensor() = default;
  Tensor(std::size_t rows, std::size_t cols, double fill = 0.0);
  Tensor(std::size_t rows, std::size_t cols, std::vector<double> values);

  static Tensor row(std::vector<double> values);
  static Tensor scalar(double v) { return Tensor(1, 1, v); }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return values_.size(); }
  bool empty() const { return values_.empty(); }
  bool same_shape(const Tensor& o) const { return rows_ == o.rows_ && cols_ == o.cols_; }

  double& operator()(std::size_t r, std::size_t c) { return values_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return values_[r * cols_ + c]; }
  double& operator[](std::size_t i) { return values_[i]; }
  double operator[](std::size_t i) const { return values_[i]; }

  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }
  std::span<const double> row_span(std::size_t r) const { return {values_.data() + r * cols_, cols_}; }
  std::span<double> row_span(std::size_t r) { return {values_.data() + r * cols_, cols_}; }

  void fill(double v);
  bool all_finite() const;

  friend bool operator==(const Tensor&, const Tensor&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> values_;
};

// Forward kernels, shared by the tape and by tape-free inference.
Tensor matmul(const Tensor& a, const Tensor& b);
// Per-row log-softmax, stabilized by the row maximum.
Tensor log_softmax_rows(const Tensor& logits);
Tensor softmax_rows(const Tensor& logits);
double log_sum_exp(std::span<const double> xs);

}  // namespace mixreason
