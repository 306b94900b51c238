#pragma once

#include <complex>
#include <random>

#include <Eigen/Dense>

#include "lzmeas/density.hpp"

namespace lzmeas::test {

inline Eigen::Matrix2cd to_eigen(const Mat2& m) {
  Eigen::Matrix2cd e;
  e << m(0, 0), m(0, 1), m(1, 0), m(1, 1);
  return e;
}

inline Mat2 from_eigen(const Eigen::Matrix2cd& e) { return {e(0, 0), e(0, 1), e(1, 0), e(1, 1)}; }

// Uniform in the Bloch ball.
inline DensityMatrix random_state(std::mt19937_64& rng, Basis b) {
  std::normal_distribution<double> n;
  std::uniform_real_distribution<double> u;
  double x = n(rng), y = n(rng), w = n(rng);
  const double scale = std::cbrt(u(rng)) / std::sqrt(x * x + y * y + w * w);
  return DensityMatrix::from_bloch({x * scale, y * scale, w * scale}, b);
}

inline Mat2 random_hermitian(std::mt19937_64& rng) {
  std::normal_distribution<double> n;
  const cplx off{n(rng), n(rng)};
  return {n(rng), off, std::conj(off), n(rng)};
}

}  // namespace lzmeas::test
