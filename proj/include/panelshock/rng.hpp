#ifndef PANELSHOCK_RNG_HPP
#define PANELSHOCK_RNG_HPP

#include <cstdint>
#include <string_view>

namespace panelshock {

// xoshiro256++ with splitmix64 seeding. Self-contained so that draws are
// bit-reproducible across platforms and standard-library versions.
//
// Streams are derived, never shared: substream(seed, tag, index) gives an
// independent generator per (module, draw/replication) pair, which makes
// parallel sampling deterministic for any worker count.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  static Rng substream(std::uint64_t seed, std::string_view tag, std::uint64_t index = 0);
  // Derived seed without constructing the generator (for nested substreams).
  static std::uint64_t derive_seed(std::uint64_t seed, std::string_view tag, std::uint64_t index = 0);

  std::uint64_t next_u64();
  double uniform();                    // [0, 1)
  double uniform(double lo, double hi);
  double normal();                     // standard normal, Box-Muller
  double normal(double mean, double sd) { return mean + sd * normal(); }
  double gamma(double shape);          // unit scale, Marsaglia-Tsang
  double chi_squared(double df) { return 2.0 * gamma(0.5 * df); }

 private:
  std::uint64_t s_[4];
  double spare_normal_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace panelshock

#endif
