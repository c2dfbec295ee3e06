#pragma once

#include <cmath>
#include <numbers>
#include <random>

#include "averop/types.hpp"

namespace averop {

// Deterministic standard-normal stream. Box-Muller is spelled out so the
// sequence does not depend on the standard library's distribution
// implementation.
class NormalSampler {
 public:
  explicit NormalSampler(unsigned long long seed) : rng_(seed) {}

  double next() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

  Vector vector(int dim, double scale = 1.0) {
    Vector v(dim);
    for (int i = 0; i < dim; ++i) v(i) = scale * next();
    return v;
  }

 private:
  double uniform() {  // in (0, 1)
    return (static_cast<double>(rng_() >> 11) + 0.5) * 0x1.0p-53;
  }

  std::mt19937_64 rng_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace averop
