#include <doctest.h>

#include <cmath>

#include "rng.hpp"

using dfosr::RandomStream;

TEST_CASE("same seed gives bit-identical sequences") {
  RandomStream a(42), b(42);
  for (int i = 0; i < 1000; ++i) {
    CHECK(a.next_u64() == b.next_u64());
  }
  RandomStream c(7), d(7);
  for (int i = 0; i < 200; ++i) {
    CHECK(c.uniform() == d.uniform());
    CHECK(c.normal() == d.normal());
    CHECK(c.gamma(1.7, 2.3) == d.gamma(1.7, 2.3));
  }
}

TEST_CASE("derived streams differ from parent and each other") {
  RandomStream a(42);
  RandomStream w0 = a.derive(0), w1 = a.derive(1);
  CHECK(w0.seed() != w1.seed());
  CHECK(w0.next_u64() != w1.next_u64());
  // derivation is deterministic
  RandomStream again = RandomStream(42).derive(0);
  CHECK(again.next_u64() == RandomStream(42).derive(0).next_u64());
}

TEST_CASE("normal and gamma moments") {
  RandomStream rng(1);
  const int n = 200000;
  double sum = 0, sum2 = 0;
  for (int i = 0; i < n; ++i) {
    const double x = rng.normal();
    sum += x;
    sum2 += x * x;
  }
  CHECK(std::abs(sum / n) < 0.01);
  CHECK(std::abs(sum2 / n - 1.0) < 0.02);

  double gsum = 0;
  for (int i = 0; i < n; ++i) gsum += rng.gamma(2.0, 1.0);
  CHECK(std::abs(gsum / n - 2.0) < 0.02);

  // small-shape branch
  double ssum = 0;
  for (int i = 0; i < n; ++i) ssum += rng.gamma(0.5, 2.0);
  CHECK(std::abs(ssum / n - 0.25) < 0.01);
}

TEST_CASE("discrete sampler follows the weights") {
  RandomStream rng(3);
  const double w[3] = {1.0, 2.0, 7.0};
  int counts[3] = {0, 0, 0};
  const int n = 100000;
  for (int i = 0; i < n; ++i) ++counts[rng.discrete(w, 3)];
  CHECK(std::abs(counts[0] / double(n) - 0.1) < 0.01);
  CHECK(std::abs(counts[1] / double(n) - 0.2) < 0.01);
  CHECK(std::abs(counts[2] / double(n) - 0.7) < 0.01);
}
