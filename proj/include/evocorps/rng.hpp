#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace evocorps {

// Seeded generator with explicitly defined distributions so that draws are
// identical across standard-library implementations (std:: distributions are
// implementation-defined; the mt19937_64 engine is not).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Independent stream keyed by (module, step, salt) under one root seed.
  // Turning a module off never shifts the draws of another module.
  static Rng stream(std::uint64_t root_seed, std::string_view module,
                    std::int64_t step, std::uint64_t salt = 0);

  std::uint64_t next() { return engine_(); }

  // [0, 1) with 53 bits of resolution.
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  // Inclusive bounds, unbiased (rejection sampling).
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);
  bool bernoulli(double p) { return uniform() < p; }
  // Box-Muller; sd == 0 returns `mean` without consuming draws.
  double normal(double mean, double sd);

  // k distinct indices from [0, n), in draw order (partial Fisher-Yates).
  std::vector<std::size_t> sample_without_replacement(std::size_t n,
                                                      std::size_t k);

 private:
  std::mt19937_64 engine_;
};

std::uint64_t splitmix64(std::uint64_t x);
std::uint64_t fnv1a64(std::string_view s);

}  // namespace evocorps
