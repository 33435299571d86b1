#pragma once

#include "psfem/mesh.hpp"

#include <vector>

namespace psfem {

/// Tensor-product Gauss-Legendre rule on [-1,1]^2.
struct GaussRule {
  struct Node {
    double xi;
    double eta;
    double weight;
  };
  int n = 0; // points per direction
  std::vector<Node> nodes;
};

/// One-dimensional Gauss-Legendre nodes and weights on [-1,1], ascending.
void gauss_legendre_1d(int n, std::vector<double> &x, std::vector<double> &w);

/// Valid for 1 <= n <= 10.
GaussRule gauss_rule(int n);

/// Sum over rule nodes of w * f(F_K(xi,eta), xi, eta) * J_K(xi,eta).
template <class F>
double integrate_on_element(const ElementGeometry &g, F &&f, const GaussRule &rule) {
  double s = 0.0;
  for (const auto &q : rule.nodes)
    s += q.weight * f(map_ref_to_phys(g, q.xi, q.eta), q.xi, q.eta) * g.jacobian(q.xi, q.eta);
  return s;
}

} // namespace psfem
