#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace cqdd {

// Purpose tags keep independent random streams apart even when their
// numeric indices coincide.
enum class StreamTag : std::uint64_t {
  data = 1,
  diffusion = 2,
  haar_train = 3,
  haar_test = 4,
  haar_norm = 5,
  theta_init = 6,
  measure_train = 7,
  measure_chain = 8,
  measure_test = 9,
  spsa = 10,
  generate = 11,
  sweep = 12,
  haar_reference = 13,
};

// Deterministic random stream keyed by (master seed, tag, indices).
// The result of any computation depends only on its key, never on which
// thread draws or in what order streams are created.
class Rng {
 public:
  using engine_type = std::mt19937_64;

  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  Rng(std::uint64_t master, StreamTag tag, std::initializer_list<std::uint64_t> indices);

  double uniform() {
    ++draws_;
    return unit_(engine_);
  }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  double normal() {
    ++draws_;
    return gauss_(engine_);
  }
  double normal(double mean, double stddev) { return mean + stddev * normal(); }
  // +1 or -1 with equal probability.
  double rademacher() {
    ++draws_;
    return (engine_() >> 63) ? 1.0 : -1.0;
  }

  // Number of variates handed out so far.
  std::uint64_t draws() const { return draws_; }
  engine_type& engine() { return engine_; }

 private:
  engine_type engine_;
  std::uniform_real_distribution<double> unit_{0.0, 1.0};
  std::normal_distribution<double> gauss_{0.0, 1.0};
  std::uint64_t draws_ = 0;
};

std::uint64_t mix_key(std::uint64_t master, StreamTag tag,
                      std::initializer_list<std::uint64_t> indices);

// A single uniform in [0,1) computed directly from the key. Cheaper than
// seeding an engine when only one variate per key is needed.
inline double keyed_uniform(std::uint64_t master, StreamTag tag,
                            std::initializer_list<std::uint64_t> indices) {
  return static_cast<double>(mix_key(master, tag, indices) >> 11) * 0x1.0p-53;
}

}  // namespace cqdd
