#pragma once

#include <cstdint>
#include <cstddef>

namespace asaga {

// Counter-based generator (splitmix64). The i-th draw of stream `seed` is
// mix(seed + (i+1)*GOLDEN), so a stream is fully determined by its seed and
// how many draws were taken. Serial solvers and async workers share streams
// by construction: worker w of a run seeded with s draws from stream s + w,
// and a serial run seeded with s draws from the same stream as worker 0.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed) : seed_(seed) {}

  static std::uint64_t at(std::uint64_t seed, std::uint64_t counter) {
    std::uint64_t z = seed + (counter + 1) * 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  std::uint64_t next_u64() { return at(seed_, counter_++); }

  // uniform in [0, n); modulo bias is < n/2^64, irrelevant at our scales
  std::size_t next_index(std::size_t n) {
    return static_cast<std::size_t>(next_u64() % n);
  }

  // uniform in [0, 1) with 53 random bits
  double next_unit() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  bool next_bernoulli(double prob) { return next_unit() < prob; }

  std::uint64_t seed() const { return seed_; }
  std::uint64_t counter() const { return counter_; }

 private:
  std::uint64_t seed_;
  std::uint64_t counter_ = 0;
};

}  // namespace asaga
