#ifndef CQR_RANDOM_HPP
#define CQR_RANDOM_HPP

#include <cstdint>
#include <limits>
#include <random>
#include <vector>

namespace cqr {

// Deterministic random stream. All draws are derived from raw engine words
// rather than std:: distributions, so results are identical across standard
// library implementations.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

  // Uniform on (0,1). Never returns exactly 0 or 1.
  double uniform01() {
    const double u = (engine_() >> 11) * 0x1.0p-53;
    return u > 0.0 ? u : 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  // Unbiased integer in [0, n) via rejection.
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % n;
    std::uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return x % n;
  }

  std::uint64_t raw() { return engine_(); }

  // Derive an independent child stream (for per-component sub-streams).
  RandomStream fork() { return RandomStream(engine_()); }

 private:
  std::mt19937_64 engine_;
};

template <typename T>
void shuffle_in_place(std::vector<T>& v, RandomStream& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    std::swap(v[i - 1], v[rng.below(i)]);
  }
}

}  // namespace cqr

#endif  // CQR_RANDOM_HPP
