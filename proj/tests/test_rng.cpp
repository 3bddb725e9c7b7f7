// Copyright (c) stosqp contributors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <vector>

#include <doctest.h>

#include "stosqp/rng.hpp"

using stosqp::RngStream;

TEST_CASE("same seed and stream replay bit-identically") {
  RngStream a(42, 1);
  RngStream b(42, 1);
  for (int i = 0; i < 1000; ++i) {
    CHECK(a.next_u64() == b.next_u64());
  }
  RngStream c(42, 1);
  RngStream d(42, 1);
  for (int i = 0; i < 1000; ++i) {
    CHECK(c.next_normal() == d.next_normal());
  }
}

TEST_CASE("distinct stream ids give distinct sequences") {
  RngStream a(42, 1);
  RngStream b(42, 2);
  int same = 0;
  for (int i = 0; i < 256; ++i) {
    if (a.next_u64() == b.next_u64()) ++same;
  }
  CHECK(same == 0);
}

TEST_CASE("derive_seed separates consecutive indices") {
  CHECK(stosqp::derive_seed(7, 0) != stosqp::derive_seed(7, 1));
  CHECK(stosqp::derive_seed(7, 1) != stosqp::derive_seed(8, 1));
}

TEST_CASE("uniform moments") {
  RngStream rng(123, 0);
  const int n = 200000;
  double sum = 0.0, sum_sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double u = rng.next_uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    sum += u;
    sum_sq += u * u;
  }
  const double mean = sum / n;
  const double var = sum_sq / n - mean * mean;
  CHECK(mean == doctest::Approx(0.5).epsilon(0.01));
  CHECK(var == doctest::Approx(1.0 / 12.0).epsilon(0.02));
}

TEST_CASE("normal moments") {
  RngStream rng(321, 0);
  const int n = 200000;
  double sum = 0.0, sum_sq = 0.0, sum_4 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double z = rng.next_normal();
    sum += z;
    sum_sq += z * z;
    sum_4 += z * z * z * z;
  }
  CHECK(sum / n == doctest::Approx(0.0).epsilon(1).scale(0.01));
  CHECK(sum_sq / n == doctest::Approx(1.0).epsilon(0.02));
  CHECK(sum_4 / n == doctest::Approx(3.0).epsilon(0.05));
}
