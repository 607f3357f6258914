#pragma once

#include <cstdint>

namespace sqlab {

// SplitMix64 (Steele, Lea & Flood 2014): 64-bit state, one multiply-xorshift
// chain per output. Chosen because the output sequence is defined exactly by
// the algorithm, with no implementation-defined behavior, so identical seeds
// give byte-identical results on every platform. Standard-library
// distributions are deliberately not used anywhere in sampling code.
//
// Stream contract: a run is seeded with a single 64-bit value; independent
// substreams (one per detector, correlator, or sweep point) are derived with
// substream(seed, purpose), which reseeds SplitMix64 with a mixed value and
// discards one output. Purposes are small enumerated integers, documented at
// each call site.
class SplitMix64 {
 public:
  explicit SplitMix64(uint64_t seed) : state_(seed) {}

  uint64_t next() {
    uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1), 53 random bits.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

 private:
  uint64_t state_;
};

inline SplitMix64 substream(uint64_t seed, uint64_t purpose) {
  SplitMix64 g(seed ^ (0xD1B54A32D192ED03ULL * (purpose + 1)));
  g.next();
  return g;
}

}  // namespace sqlab
