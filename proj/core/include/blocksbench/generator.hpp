#pragma once

#include <cstdint>

#include "blocksbench/scenario.hpp"

namespace blocksbench {

/// Splitmix64 step; also used to derive stream seeds.
uint64_t splitmix64(uint64_t& state);

/// Deterministic, platform-independent generator (std:: distributions are
/// implementation-defined, which would break byte-identical suites).
class Rng {
 public:
  explicit Rng(uint64_t seed);

  uint64_t next();
  uint32_t below(uint32_t bound);        // uniform in [0, bound)
  int range(int lo, int hi);             // uniform inclusive
  bool chance(uint32_t num, uint32_t den);

  template <class T>
  void shuffle(std::vector<T>& items) {
    for (size_t i = items.size(); i > 1; --i) {
      std::swap(items[i - 1], items[below(static_cast<uint32_t>(i))]);
    }
  }

  template <class T>
  const T& pick(const std::vector<T>& items) {
    return items[below(static_cast<uint32_t>(items.size()))];
  }

 private:
  uint64_t state_;
};

struct GenSpec {
  int category = 1;
  int blocks = 5;
  int positions = 3;
  std::string size_profile;  // "", "uniform" or "varied"
  uint64_t seed = 0;
  /// Sub-recipe steering; 0 picks automatically. Category 3: 1 = gripper
  /// deadlock, 2 = buried size inversion (large closure), 3 = ascending
  /// goal stack. Category 4: 3..5 = Towers of Hanoi with that many disks.
  int variant = 0;
};

/// Rejection-samples instances until the category predicate holds, verifying
/// with the oracle. Deterministic in `spec`. Errors with a
/// GenerationExhausted message after a bounded attempt count.
Result<Scenario, std::string> generate_scenario(const GenSpec& spec);

/// Master seed the shipped scenarios/ tree was generated from.
inline constexpr uint64_t kSuiteSeed = 0x9e2ab5f4c01d773eULL;

/// The frozen 50-scenario suite (10 per category), ids cat{1..5}/s{01..10}.
Result<std::vector<Scenario>, std::string> generate_suite(
    uint64_t master_seed = kSuiteSeed);

/// Friendly block names: A..Z, then A1, A2, ...
std::string block_name(int index);

}  // namespace blocksbench
