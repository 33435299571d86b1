#include "psfem/material.hpp"

#include "psfem/errors.hpp"

#include <string>

namespace psfem {

Material Material::from_young_poisson(double E, double nu) {
  if (!(E > 0.0)) throw InputError("Young's modulus must be positive, got " + std::to_string(E));
  if (!(nu > 0.0 && nu < 0.5))
    throw InputError("Poisson ratio must lie in (0, 0.5), got " + std::to_string(nu));
  Material m;
  m.E = E;
  m.nu = nu;
  m.mu = E / (2.0 * (1.0 + nu));
  m.lambda = E * nu / ((1.0 + nu) * (1.0 - 2.0 * nu));
  return m;
}

SymTensor2 stiffness_apply(const Material &m, const SymTensor2 &eps) {
  const double ltr = m.lambda * eps.trace();
  return {2.0 * m.mu * eps.t11 + ltr, 2.0 * m.mu * eps.t22 + ltr, 2.0 * m.mu * eps.t12};
}

SymTensor2 compliance_apply(const Material &m, const SymTensor2 &sig) {
  const double c = m.lambda / (2.0 * (m.mu + m.lambda));
  const double ctr = c * sig.trace();
  const double s = 1.0 / (2.0 * m.mu);
  return {s * (sig.t11 - ctr), s * (sig.t22 - ctr), s * sig.t12};
}

} // namespace psfem
