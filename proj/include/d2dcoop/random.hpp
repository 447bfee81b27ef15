#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <vector>

#include <Eigen/Core>

namespace d2dcoop {

// 64-bit finalizer (splitmix64). Used for key derivation only.
inline std::uint64_t hash64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t combine_keys(std::uint64_t h, std::uint64_t v) {
  return hash64(h ^ (hash64(v) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2)));
}

// Counter-keyed pseudo-random stream (xoshiro256** seeded through splitmix64).
//
// Every stream is identified by a 64-bit key. Independent substreams are
// derived from the key alone, never from the current draw position, so the
// set of values produced for a given (master seed, derivation path) does not
// depend on scheduling or on how many draws other streams consumed. That is
// what makes experiment output reproducible under any worker-thread count.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t key) : key_(key) {
    std::uint64_t x = key;
    for (auto& w : s_) {
      x += 0x9e3779b97f4a7c15ULL;
      std::uint64_t z = x;
      z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
      z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
      w = z ^ (z >> 31);
    }
    if ((s_[0] | s_[1] | s_[2] | s_[3]) == 0) s_[0] = 1;
  }

  std::uint64_t key() const { return key_; }

  // Independent stream for a sub-task, a function of the key only.
  RandomStream child(std::uint64_t a) const {
    return RandomStream(combine_keys(key_, a));
  }
  RandomStream child(std::uint64_t a, std::uint64_t b) const {
    return RandomStream(combine_keys(combine_keys(key_, a), b));
  }

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  // Uniform on [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  // Unit-mean exponential via inverse CDF.
  double exponential() { return -std::log1p(-uniform01()); }

  // Unbiased integer on [0, n). n must be positive.
  std::uint64_t uniform_index(std::uint64_t n) {
    unsigned __int128 m = static_cast<unsigned __int128>(next_u64()) * n;
    auto lo = static_cast<std::uint64_t>(m);
    if (lo < n) {
      const std::uint64_t t = (0 - n) % n;
      while (lo < t) {
        m = static_cast<unsigned __int128>(next_u64()) * n;
        lo = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::uint64_t>(m >> 64);
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }

  std::uint64_t key_;
  std::array<std::uint64_t, 4> s_;
};

template <typename T>
void shuffle(std::vector<T>& items, RandomStream& rng) {
  for (std::size_t i = items.size(); i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(rng.uniform_index(i));
    std::swap(items[i - 1], items[j]);
  }
}

}  // namespace d2dcoop
