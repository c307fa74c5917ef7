#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace ssd {

// Derives an independent stream seed from a base seed and a stream tag, so
// that e.g. the dictionary and the signals of one experiment never share
// random draws.
std::uint64_t derive_seed(std::uint64_t base, std::string_view stream,
                          std::uint64_t index = 0);

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double normal() { return normal_(engine_); }

  // k distinct values from [0, n), in draw order. Requires k <= n.
  std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t k);

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace ssd
