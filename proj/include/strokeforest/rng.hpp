#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <utility>

namespace strokeforest {

/// SplitMix64 finalizer. Used to derive child seeds; not a stream generator.
std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// Child seed for stream `index` under `parent`. Pure function of its inputs,
/// so work units can be scheduled in any order without changing results.
std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t index) noexcept;

/// Random stream with platform-stable draws.
///
/// The engine is std::mt19937_64, whose output sequence is fixed by the
/// standard. The standard distributions are implementation-defined, so the
/// variates below are computed here to keep reports byte-identical across
/// standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform integer on [0, n). Requires n > 0.
  std::uint64_t below(std::uint64_t n);

  /// Standard normal variate (Marsaglia polar method, no cached pair).
  double normal();

  bool bernoulli(double p) { return uniform() < p; }

  template <typename T>
  void shuffle(std::span<T> values) {
    for (std::size_t i = values.size(); i > 1; --i) {
      std::swap(values[i - 1], values[below(i)]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace strokeforest
