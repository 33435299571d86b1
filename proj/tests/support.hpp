#pragma once

#include "psfem/mesh.hpp"

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <random>

namespace testing_support {

// Random strictly convex counter-clockwise quad: perturbed points on a
// jittered ellipse, rejected until the bilinear Jacobian margin is clear.
// Rotations stay within 30 degrees so the first node sits near the
// reference (-1,-1) corner, as in a mesh generator's output.
inline psfem::QuadVertices random_convex_quad(std::mt19937 &rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double pi = std::acos(-1.0);
  for (;;) {
    const double rx = 0.2 + 2.0 * u(rng), ry = 0.2 + 2.0 * u(rng), rot = (u(rng) - 0.5) * pi / 3;
    const Eigen::Vector2d c(10 * u(rng) - 5, 10 * u(rng) - 5);
    psfem::QuadVertices v;
    for (int i = 0; i < 4; ++i) {
      const double t = 0.5 * pi * (i - 1.5 + 0.7 * (u(rng) - 0.5));
      const Eigen::Vector2d e(rx * std::cos(t), ry * std::sin(t));
      v[i] = c + Eigen::Vector2d(std::cos(rot) * e.x() - std::sin(rot) * e.y(),
                                 std::sin(rot) * e.x() + std::cos(rot) * e.y());
    }
    double jmin = 1e300;
    for (int i = 0; i < 4; ++i) {
      const auto a = v[(i + 1) % 4] - v[i], b = v[(i + 3) % 4] - v[i];
      jmin = std::min(jmin, a.x() * b.y() - a.y() * b.x());
    }
    if (jmin > 0.05 * rx * ry) return v;
  }
}

// Three-point Gauss-Legendre, written out rather than generated.
inline constexpr std::array<double, 3> g3x = {-0.7745966692414834, 0.0, 0.7745966692414834};
inline constexpr std::array<double, 3> g3w = {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};

// Bilinear map and its Jacobian straight from the vertices.
inline Eigen::Vector2d map_point(const psfem::QuadVertices &v, double xi, double eta) {
  const double n[4] = {(1 - xi) * (1 - eta) / 4, (1 + xi) * (1 - eta) / 4,
                       (1 + xi) * (1 + eta) / 4, (1 - xi) * (1 + eta) / 4};
  Eigen::Vector2d p = Eigen::Vector2d::Zero();
  for (int i = 0; i < 4; ++i) p += n[i] * v[i];
  return p;
}

inline Eigen::Matrix2d map_jacobian(const psfem::QuadVertices &v, double xi, double eta) {
  const double dxi[4] = {-(1 - eta) / 4, (1 - eta) / 4, (1 + eta) / 4, -(1 + eta) / 4};
  const double deta[4] = {-(1 - xi) / 4, -(1 + xi) / 4, (1 + xi) / 4, (1 - xi) / 4};
  Eigen::Matrix2d J = Eigen::Matrix2d::Zero();
  for (int i = 0; i < 4; ++i) {
    J.col(0) += dxi[i] * v[i];
    J.col(1) += deta[i] * v[i];
  }
  return J;
}

} // namespace testing_support
