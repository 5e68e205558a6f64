// Seeded randomness with a fixed algorithm, so outputs are identical across
// standard library implementations.

#ifndef GHOSTEVAL_RANDOM_H_
#define GHOSTEVAL_RANDOM_H_

#include <cstdint>
#include <random>
#include <utility>
#include <vector>

namespace ghosteval {

/// splitmix64 finalizer; mixes a base seed with a stream tag.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream);

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform integer in [0, bound); bound must be positive.
  std::uint64_t uniform_index(std::uint64_t bound);

  /// Uniform real in [0, 1) with 53 bits of precision.
  double uniform01();

  template <typename T>
  void shuffle(std::vector<T>& items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      const auto j = static_cast<std::size_t>(uniform_index(i));
      std::swap(items[i - 1], items[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace ghosteval

#endif  // GHOSTEVAL_RANDOM_H_
