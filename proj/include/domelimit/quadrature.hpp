#pragma once

#include <vector>

namespace dome {

struct GaussRule {
  std::vector<double> x;  // nodes on [-1, 1]
  std::vector<double> w;
};

// Gauss-Legendre rule with n points; cached, thread-safe.
const GaussRule& gauss_legendre(int n);

}  // namespace dome
