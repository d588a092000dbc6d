#include <cmath>

#include "doctest.h"
#include "mixreason/rng.hpp"
#include "mixreason/tensor.hpp"

using namespace mixreason;

TEST_CASE("construction rejects bad shapes") {
  CHECK_THROWS_AS(Tensor(0, 3, std::vector<double>{}), ShapeMismatch);
  CHECK_THROWS_AS(Tensor(2, 2, std::vector<double>{1, 2, 3}), ShapeMismatch);
  Tensor t(2, 3, std::vector<double>{1, 2, 3, 4, 5, 6});
  CHECK(t(1, 0) == 4);
  CHECK(t.row_span(1)[2] == 6);
}

TEST_CASE("matmul") {
  Tensor eye(2, 2, std::vector<double>{1, 0, 0, 1});
  Tensor a(2, 3, std::vector<double>{1, -2, 3, 0.5, 5, -6});
  CHECK(matmul(eye, a) == a);
  Tensor b(3, 1, std::vector<double>{1, 1, 1});
  auto c = matmul(a, b);
  CHECK(c(0, 0) == doctest::Approx(2));
  CHECK(c(1, 0) == doctest::Approx(-0.5));
  CHECK_THROWS_AS(matmul(a, a), ShapeMismatch);
}

TEST_CASE("softmax rows") {
  auto p = softmax_rows(Tensor(1, 3, 0.0));
  for (double v : p.values()) CHECK(v == doctest::Approx(1.0 / 3.0).epsilon(1e-15));

  Rng rng(4);
  Tensor logits(5, 7);
  for (double& v : logits.values()) v = rng.uniform(-30, 30);
  logits(0, 0) = 800;  // stability
  auto s = softmax_rows(logits);
  auto ls = log_softmax_rows(logits);
  for (std::size_t r = 0; r < 5; ++r) {
    double sum = 0;
    for (double v : s.row_span(r)) sum += v;
    CHECK(std::abs(sum - 1.0) <= 1e-12);
    for (std::size_t c = 0; c < 7; ++c) CHECK(std::isfinite(ls(r, c)));
  }
}

TEST_CASE("log_sum_exp") {
  const double xs[] = {std::log(0.2), std::log(0.4)};
  CHECK(log_sum_exp(xs) == doctest::Approx(std::log(0.6)).epsilon(1e-14));
  const double big[] = {1000.0, 1000.0};
  CHECK(log_sum_exp(big) == doctest::Approx(1000.0 + std::log(2.0)));
}

TEST_CASE("kernels are bit-deterministic") {
  Rng rng(1);
  Tensor a(4, 6), b(6, 3);
  for (double& v : a.values()) v = rng.uniform(-1, 1);
  for (double& v : b.values()) v = rng.uniform(-1, 1);
  CHECK(matmul(a, b) == matmul(a, b));
  CHECK(log_softmax_rows(a) == log_softmax_rows(a));
}
