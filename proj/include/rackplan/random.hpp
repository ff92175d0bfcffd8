#ifndef RACKPLAN_RANDOM_HPP
#define RACKPLAN_RANDOM_HPP

#include <cstdint>
#include <string_view>

namespace rackplan {

/// Counter-based random stream: every draw is a pure function of the seed
/// and a tuple of counters, so samples for one (step, attempt) never shift
/// when other draws are added or removed. Output is identical on every
/// platform.
class SeedStream {
 public:
  enum class Purpose : std::uint64_t { action = 1, observe_merge = 2, observe_omit = 3 };

  explicit SeedStream(std::uint64_t seed) : seed_(seed) {}

  std::uint64_t seed() const { return seed_; }

  std::uint64_t bits(Purpose p, std::uint64_t a, std::uint64_t b = 0, std::uint64_t c = 0) const {
    std::uint64_t x = mix(seed_ ^ mix(static_cast<std::uint64_t>(p) * 0x9E3779B97F4A7C15ull));
    x = mix(x ^ mix(a + 0x632BE59BD9B4E019ull));
    x = mix(x ^ mix(b + 0x85157AF5ull * 0x2545F4914F6CDD1Dull));
    x = mix(x ^ mix(c + 0xD1B54A32D192ED03ull));
    return x;
  }

  /// Uniform in [0, 1).
  double uniform(Purpose p, std::uint64_t a, std::uint64_t b = 0, std::uint64_t c = 0) const {
    return static_cast<double>(bits(p, a, b, c) >> 11) * 0x1.0p-53;
  }

  static std::uint64_t hash(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char ch : s) {
      h ^= ch;
      h *= 0x100000001b3ull;
    }
    return h;
  }

 private:
  // SplitMix64 finalizer.
  static std::uint64_t mix(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  std::uint64_t seed_;
};

}  // namespace rackplan

#endif  // RACKPLAN_RANDOM_HPP
