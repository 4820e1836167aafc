#include "acoustolab/sampling.hpp"

#include <cmath>

namespace acoustolab {

double halton(std::uint64_t index, unsigned base) {
  double f = 1.0, r = 0.0;
  while (index > 0) {
    f /= base;
    r += f * static_cast<double>(index % base);
    index /= base;
  }
  return r;
}

double Rng::uniform() {
  // 53 bits -> double in [0,1), same on every platform.
  return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
}

double Rng::uniform(double a, double b) { return a + (b - a) * uniform(); }

double Rng::normal() {
  if (have_spare_) {
    have_spare_ = false;
    return spare_;
  }
  double u1 = uniform(), u2 = uniform();
  while (u1 <= 0.0) u1 = uniform();  // guard log(0)
  const double mag = std::sqrt(-2.0 * std::log(u1));
  const double ang = 2.0 * M_PI * u2;
  spare_ = mag * std::sin(ang);
  have_spare_ = true;
  return mag * std::cos(ang);
}

int Rng::uniform_int(int lo, int hi) {
  // Rejection-free modulo is biased but the ranges here are tiny; keep it
  // reproducible and simple.
  const std::uint64_t span = static_cast<std::uint64_t>(hi - lo + 1);
  return lo + static_cast<int>(gen_() % span);
}

}  // namespace acoustolab
