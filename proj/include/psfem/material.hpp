#pragma once

namespace psfem {

/// Symmetric 2x2 tensor stored as (t11, t22, t12); t12 is the tensor
/// component, so contractions weight the shear slot by 2.
struct SymTensor2 {
  double t11 = 0.0;
  double t22 = 0.0;
  double t12 = 0.0;

  double trace() const { return t11 + t22; }
};

/// sigma : tau = s11 t11 + s22 t22 + 2 s12 t12.
inline double contract(const SymTensor2 &s, const SymTensor2 &t) {
  return s.t11 * t.t11 + s.t22 * t.t22 + 2.0 * s.t12 * t.t12;
}

/// Squared Euclidean norm of the component triple (s11, s22, s12). This is
/// the norm the convergence tables report for stresses.
inline double component_norm2(const SymTensor2 &s) {
  return s.t11 * s.t11 + s.t22 * s.t22 + s.t12 * s.t12;
}

/// Isotropic plane-strain material.
struct Material {
  double E = 0.0;
  double nu = 0.0;
  double mu = 0.0;
  double lambda = 0.0;

  /// Throws InputError unless E > 0 and 0 < nu < 0.5.
  static Material from_young_poisson(double E, double nu);
};

/// C eps = 2 mu eps + lambda tr(eps) I.
SymTensor2 stiffness_apply(const Material &m, const SymTensor2 &eps);

/// C^-1 sig = (sig - lambda / (2 (mu + lambda)) tr(sig) I) / (2 mu).
SymTensor2 compliance_apply(const Material &m, const SymTensor2 &sig);

} // namespace psfem
