// Seedable random source used everywhere randomness is needed.
//
// The raw stream is std::mt19937_64, which produces identical output on every
// conforming implementation. Bounded draws go through our own rejection
// sampling instead of std::uniform_int_distribution, whose output is
// implementation-defined; this keeps generated instances and experiment CSVs
// byte-identical across platforms for a fixed seed.
#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace fairalloc {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next() { return gen_(); }

  // Uniform on [lo, hi], inclusive.
  int uniform_int(int lo, int hi) {
    std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
    std::uint64_t limit = UINT64_MAX - UINT64_MAX % span;
    std::uint64_t draw;
    do {
      draw = gen_();
    } while (draw >= limit);
    return lo + static_cast<int>(draw % span);
  }

  // Uniform on [0, 1) with 53 bits of precision.
  double uniform01() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  template <typename T>
  void shuffle(std::vector<T>& values) {
    for (int i = static_cast<int>(values.size()) - 1; i > 0; --i) {
      std::swap(values[static_cast<size_t>(i)],
                values[static_cast<size_t>(uniform_int(0, i))]);
    }
  }

  std::vector<int> permutation(int n) {
    std::vector<int> perm(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) perm[static_cast<size_t>(i)] = i;
    shuffle(perm);
    return perm;
  }

 private:
  std::mt19937_64 gen_;
};

// splitmix64 step; used to derive independent per-task seeds from a master
// seed so parallel and serial experiment runs see the same streams.
inline std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
  std::uint64_t z = a + 0x9e3779b97f4a7c15ULL * (b + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace fairalloc
