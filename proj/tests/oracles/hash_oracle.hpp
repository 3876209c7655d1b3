#pragma once

#include <cmath>

namespace oracle {

// Balls into bins: with n keys in m cells, the number of keys that land in an
// already occupied cell has mean n - m (1 - (1 - 1/m)^n). For n^2 << m^2 the
// count is close to Poisson, so the variance is taken equal to the mean.
struct CollisionBound {
  double mean;
  double sigma;
};

inline CollisionBound birthday_collisions(double n, double m) {
  const double mean = n - m * (1.0 - std::pow(1.0 - 1.0 / m, n));
  return {mean, std::sqrt(mean)};
}

}  // namespace oracle
