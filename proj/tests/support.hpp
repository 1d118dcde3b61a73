#pragma once

#include <random>

#include "dualscheme/common.hpp"

namespace testing_support {

inline dualscheme::Vec random_vec(std::mt19937_64& rng, int dim, double scale = 3.0) {
  std::uniform_real_distribution<double> u(-scale, scale);
  dualscheme::Vec v(dim);
  for (int i = 0; i < dim; ++i) v[i] = u(rng);
  return v;
}

inline dualscheme::Vec vec(std::initializer_list<double> values) {
  dualscheme::Vec v(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (double x : values) v[i++] = x;
  return v;
}

}  // namespace testing_support
