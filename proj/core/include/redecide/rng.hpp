#pragma once

#include <cstdint>

namespace redecide {

// Deterministic, portable PRNG: xoshiro256++ seeded through splitmix64.
// The algorithm is fully specified by this header plus rng.cpp so that a
// reimplementation in another language can replicate the stream exactly:
//
//   seeding     four successive splitmix64 outputs starting from `seed`
//   next_u64    rotl(s0 + s3, 23) + s0, then the xoshiro256 state transition
//   uniform     (next_u64() >> 11) * 2^-53, in [0, 1)
//   below(n)    rejection-sampled modulo (unbiased)
//   normal      Marsaglia polar method, one cached spare per pair
//
// Identical seed implies an identical stream. Instances are cheap values;
// parallel work derives one independent stream per unit via `stream`.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  // Child stream for a (master seed, stream id) pair:
  //   a = splitmix64(master); child_seed = splitmix64(id ^ a); Rng(child_seed)
  static Rng stream(std::uint64_t master_seed, std::uint64_t stream_id);

  std::uint64_t next_u64();
  double uniform();  // [0, 1)
  double uniform(double lo, double hi);
  std::uint64_t below(std::uint64_t n);  // {0, ..., n-1}
  double normal();  // standard normal

 private:
  std::uint64_t s_[4];
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace redecide
