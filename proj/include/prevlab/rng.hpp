#ifndef PREVLAB_RNG_HPP
#define PREVLAB_RNG_HPP

#include <cstdint>
#include <string_view>

namespace prevlab {

// splitmix64 step; the state walk and the output mix are the standard ones.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t mix64(std::uint64_t x) {
  std::uint64_t s = x;
  return splitmix64(s);
}

// FNV-1a over a string; used to fold module names into sub-seeds.
inline std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

// Sub-seed for (master seed, module name, task index). Counter-based: any
// task's stream is reachable without generating the streams before it, so
// results cannot depend on worker count or scheduling.
inline std::uint64_t sub_seed(std::uint64_t master, std::string_view module,
                              std::uint64_t task) {
  return mix64(mix64(master ^ fnv1a(module)) ^ task);
}

// Small counter-based generator: the seed fully determines the stream.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(mix64(seed)) {}

  std::uint64_t next_u64() { return splitmix64(state_); }

  // uniform in [0, 1)
  double uniform01() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  // uniform integer in [0, n)
  std::uint64_t below(std::uint64_t n) { return next_u64() % n; }

 private:
  std::uint64_t state_;
};

}  // namespace prevlab

#endif
