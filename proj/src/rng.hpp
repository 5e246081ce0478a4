#pragma once

#include <cstdint>

namespace dfosr {

// Seedable random stream (xoshiro256++ behind splitmix64 seeding). Identical
// seed + identical call sequence gives bit-identical output, independent of
// platform or standard-library version. Streams are cheap to copy; derive()
// produces an independently seeded stream for a worker index.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed);

  std::uint64_t next_u64();

  double uniform();                       // U[0, 1)
  double uniform_open();                  // U(0, 1)
  double uniform(double lo, double hi);
  double normal();                        // N(0, 1)
  double normal(double mean, double sd);
  double exponential();                   // Exp(1)
  double gamma(double shape, double rate);
  int discrete(const double* weights, int n);  // index ~ weights (unnormalized)

  RandomStream derive(std::uint64_t worker_index) const;
  std::uint64_t seed() const { return seed_; }

 private:
  std::uint64_t seed_;
  std::uint64_t s_[4];
  double cached_normal_ = 0.0;
  bool has_cached_normal_ = false;
};

}  // namespace dfosr
