#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

namespace typeprobe {

/// Deterministic random stream.
///
/// Wraps std::mt19937_64, whose output sequence is fixed by the standard, and
/// implements the derived distributions locally: the std:: distributions are
/// implementation-defined and would make datasets differ between toolchains.
class SeededRng {
 public:
  explicit SeededRng(std::uint64_t seed) : engine_(seed) {}

  /// Stream keyed by SHA-256(master_seed, label, index). Streams for distinct
  /// (label, index) pairs are independent, so sample i can be regenerated
  /// without touching any other sample.
  static SeededRng for_stream(std::uint64_t master_seed, std::string_view label,
                              std::uint64_t index);

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform integer in [0, n). n must be positive.
  std::size_t uniform_index(std::size_t n);

  /// Uniform real in [0, 1) with 53 bits of resolution.
  double uniform01();

  /// Standard normal deviate (Box-Muller, second value cached).
  double normal();

  bool bernoulli(double p) { return uniform01() < p; }

  template <class T>
  void shuffle(std::vector<T>& items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      std::swap(items[i - 1], items[uniform_index(i)]);
    }
  }

  template <class T>
  const T& pick(std::span<const T> items) {
    return items[uniform_index(items.size())];
  }
  template <class T>
  const T& pick(const std::vector<T>& items) {
    return items[uniform_index(items.size())];
  }

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace typeprobe
