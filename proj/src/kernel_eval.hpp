#pragma once

#include <cmath>

#include "swdist/kernels.hpp"

namespace swdist::kernels {

inline double int_pow(double base, int exp) {
  double r = 1.0;
  for (int i = 0; i < exp; ++i) r *= base;
  return r;
}

inline double evaluate(const PairKernel& k, double dot, double sq_dist) {
  switch (k.kind) {
    case PairKernel::Kind::Polynomial:
      return int_pow(k.gamma * dot + k.coef, k.degree);
    case PairKernel::Kind::Rbf:
      return std::exp(-sq_dist / (2.0 * k.sigma * k.sigma));
  }
  return 0.0;
}

}  // namespace swdist::kernels
