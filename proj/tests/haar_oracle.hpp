#pragma once

// Test-only dense Haar basis, built straight from the continuous
// tensor-product definition sampled at cell midpoints. Independent of the
// recursive averaging/differencing transform it checks.

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "ndtv/shape.hpp"

namespace ndtv::testutil {

inline double haar_box(double t) { return t >= 0.0 && t < 1.0 ? 1.0 : 0.0; }

inline double haar_step(double t) {
  if (t >= 0.0 && t < 0.5) return 1.0;
  if (t >= 0.5 && t < 1.0) return -1.0;
  return 0.0;
}

// Rows ordered exactly like the flat coefficient layout: the constant array
// first, then level j = 0..n-1, cube index (lexicographic), orientation
// bitmask e = 1..2^d-1 (axis a lives at bit d-1-a).
inline Eigen::MatrixXd dense_haar_basis(std::size_t d, std::size_t n) {
  const Shape cube = Shape::cube(d, n);
  const std::size_t total = cube.size();
  Eigen::MatrixXd basis(total, total);
  const double root = std::pow(static_cast<double>(n), -static_cast<double>(d) / 2.0);

  std::vector<std::size_t> alpha(d);
  for (std::size_t col = 0; col < total; ++col) basis(0, col) = root;

  std::size_t levels = 0;
  while ((std::size_t{1} << levels) < n) ++levels;

  std::size_t row = 1;
  for (std::size_t j = 0; j < levels; ++j) {
    const Shape cubes = Shape::cube(d, std::size_t{1} << j);
    const double dil = std::pow(2.0, static_cast<double>(j * d) / 2.0);
    std::vector<std::size_t> k(d);
    for (std::size_t cube_flat = 0; cube_flat < cubes.size(); ++cube_flat) {
      cubes.unflat(cube_flat, k);
      for (std::size_t e = 1; e < (std::size_t{1} << d); ++e) {
        for (std::size_t col = 0; col < total; ++col) {
          cube.unflat(col, alpha);
          double value = root * dil;
          for (std::size_t a = 0; a < d; ++a) {
            const double u = (static_cast<double>(alpha[a]) + 0.5) / static_cast<double>(n);
            const double t = std::ldexp(u, static_cast<int>(j)) - static_cast<double>(k[a]);
            const bool active = (e >> (d - 1 - a)) & 1;
            value *= active ? haar_step(t) : haar_box(t);
          }
          basis(row, col) = value;
        }
        ++row;
      }
    }
  }
  return basis;
}

}  // namespace ndtv::testutil
