#pragma once

// Deterministic sampling utilities.  Two requirements drive this file:
//  * results must be bit-reproducible across platforms for a fixed seed, so
//    we avoid std::uniform_real_distribution / std::normal_distribution whose
//    output is implementation-defined;
//  * phase-space sampling for the control-condition check wants
//    low-discrepancy coverage, hence Halton sequences.

#include <cstdint>
#include <random>

namespace acoustolab {

// van der Corput radical inverse in the given base; halton(i, 2), halton(i, 3)
// give a 2-d low-discrepancy sequence.
double halton(std::uint64_t index, unsigned base);

// Deterministic uniform doubles in [0,1) built from the raw mt19937_64
// stream (53 random bits per draw).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  double uniform();                       // [0, 1)
  double uniform(double a, double b);     // [a, b)
  double normal();                        // Box-Muller, deterministic
  int uniform_int(int lo, int hi);        // inclusive bounds

 private:
  std::mt19937_64 gen_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace acoustolab
