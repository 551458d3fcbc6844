#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace aoed {

// All randomness is routed through one master seed with named substreams so
// that every randomized quantity (prior draws, noise, probes, random designs)
// is reproducible in isolation and independent of evaluation order.
std::uint64_t substream_seed(std::uint64_t master, std::string_view name,
                             std::uint64_t index = 0);

// Deterministic standard-normal stream on top of mt19937_64. Box-Muller is
// used instead of std::normal_distribution, whose output is
// implementation-defined.
class NormalStream {
 public:
  explicit NormalStream(std::uint64_t seed) : eng_(seed) {}

  double operator()();

  // Uniform on [0,1) with 53-bit resolution.
  double uniform();

  std::mt19937_64& engine() { return eng_; }

 private:
  std::mt19937_64 eng_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace aoed
