#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace civic {

// Seeded mt19937_64 with hand-rolled draws. The engine's output sequence is
// pinned by the standard, and avoiding std::shuffle / distributions keeps
// results identical across library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next_u64() { return gen_(); }

  // draw in [0, n); modulo bias is irrelevant at these scales
  std::size_t bounded(std::size_t n) { return static_cast<std::size_t>(gen_() % n); }

  // [0, 1)
  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  template <class T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[bounded(i)]);
  }

 private:
  std::mt19937_64 gen_;
};

}  // namespace civic
