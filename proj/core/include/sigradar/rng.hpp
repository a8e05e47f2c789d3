#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace sigradar {

/// Seeded generator with portable bounded draws. std:: distributions are
/// implementation-defined, so results would differ across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }
  // Uniform integer in [0, n).
  std::size_t index(std::size_t n);
  // Uniform double in [0, 1) with 53 random bits.
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  double normal();
  // Derives an independent child seed.
  std::uint64_t fork() { return mix(next()); }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[index(i)]);
  }

  static std::uint64_t mix(std::uint64_t x);

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

/// Order-sensitive stable hash used for per-task seeds.
class SeedHasher {
 public:
  explicit SeedHasher(std::uint64_t base);
  SeedHasher& add(std::string_view bytes);
  SeedHasher& add(std::int64_t value);
  std::uint64_t value() const { return Rng::mix(state_); }

 private:
  std::uint64_t state_;
};

}  // namespace sigradar
