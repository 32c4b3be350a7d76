#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace blockforge {

using u8 = std::uint8_t;
using u32 = std::uint32_t;
using u64 = std::uint64_t;
using i64 = std::int64_t;

// Error categories; the CLI maps them onto exit codes 2 / 3 / 4.
struct InvalidInput : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct BudgetExceeded : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct InternalInvariant : std::logic_error {
  using std::logic_error::logic_error;
};

inline void require(bool cond, const char* msg) {
  if (!cond) throw InvalidInput(msg);
}
inline void invariant(bool cond, const char* msg) {
  if (!cond) throw InternalInvariant(msg);
}

// Counter-based generator: output(i) = mix64(seed + i*GAMMA) with the
// SplitMix64 finalizer. The exact algorithm is documented in the README so
// seeded runs can be replayed in any language.
class Rng {
 public:
  static constexpr u64 kGamma = 0x9E3779B97F4A7C15ull;

  static u64 mix64(u64 z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ull;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBull;
    z ^= z >> 31;
    return z;
  }

  explicit Rng(u64 seed) : seed_(seed), counter_(0) {}

  u64 seed() const { return seed_; }

  u64 next() {
    ++counter_;
    return mix64(seed_ + counter_ * kGamma);
  }

  // Uniform in [0, n); n = 0 yields 0. Plain modulo, fixed by contract:
  // determinism across platforms matters more than the negligible bias.
  u64 bounded(u64 n) { return n == 0 ? 0 : next() % n; }

  // Uniform double in [0, 1) using the top 53 bits.
  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // Independent child stream; formula is part of the replay contract.
  Rng fork(u64 tag) const { return Rng(mix64(seed_ + mix64(tag ^ kGamma))); }

 private:
  u64 seed_;
  u64 counter_;
};

// Resolve a worker count: explicit request wins, else BLOCKFORGE_THREADS,
// else 1. Results never depend on the value, only wall time does.
int resolve_threads(int requested);

// Static contiguous partition of [0, n); fn(worker, begin, end) runs on up to
// `threads` workers. Callers merge per-worker state in worker order, which
// keeps every reduction independent of the worker count.
void parallel_for(std::size_t n, int threads,
                  const std::function<void(int, std::size_t, std::size_t)>& fn);

}  // namespace blockforge
