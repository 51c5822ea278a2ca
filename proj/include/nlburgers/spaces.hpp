#pragma once

#include <Eigen/Dense>

#include "nlburgers/galerkin.hpp"
#include "nlburgers/kernel.hpp"

namespace nlb {

/// Norms of a field in the weighted nonlocal space. `gagliardo` and
/// `weighted_l2` come from direct quadrature of the field (never through the
/// assembled matrix) so that v_norm^2 = gagliardo^2 + weighted_l2^2 is an
/// independent check of the assembly.
struct NormReport {
  double l2 = 0.0;           // ||u||_H
  double gagliardo = 0.0;    // [u]_{W^{alpha/2,2}(D)}
  double weighted_l2 = 0.0;  // (int rho u^2)^{1/2}
  double v_norm = 0.0;       // (u^T A u)^{1/2}
};

NormReport norms(const Field& u, const NonlocalForm& form);

/// int_D int_D (u(x)-u(y))^2 |x-y|^{-1-alpha} dx dy by direct quadrature.
double gagliardo_seminorm_sq(const Field& u, FractionalOrder alpha);

/// int_D rho(x) u(x)^2 dx by direct quadrature.
double weighted_l2_sq(const Field& u, FractionalOrder alpha);

/// Fractional scale built from the discrete eigenvalues:
/// ||u||_(s)^2 = sum_k lambda_k^{2s/alpha} u_k^2.
/// Non-owning: the basis must outlive the scale.
class SpectralScale {
 public:
  SpectralScale(const EigenBasis& basis, FractionalOrder alpha);

  const EigenBasis& basis() const { return *basis_; }
  FractionalOrder alpha() const { return alpha_; }

  /// ||.||_(s) of modal coefficients (s may be negative).
  double norm(const Eigen::VectorXd& modal, double s) const;
  /// Per-mode weights lambda_k^{2s/alpha}.
  Eigen::VectorXd weights(double s) const;

 private:
  const EigenBasis* basis_;
  FractionalOrder alpha_;
};

/// (sum_k lambda_k^{-2s/alpha} w_k^2)^{1/2}, w_k = phi_k^T w. Throws DomainError for s <= 0.
double dual_norm(const DualField& w, const SpectralScale& scale, double s);

/// dual_norm(A u, alpha/2) / ||u||_V. Throws DomainError for u = 0.
double operator_dual_bound_check(const Field& u, const NonlocalForm& form, const SpectralScale& scale);

}  // namespace nlb
