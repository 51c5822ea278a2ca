#pragma once

#include <Eigen/Dense>

#include "nlburgers/kernel.hpp"

namespace nlb {

/// First n discrete eigenpairs of A phi = lambda M phi, M-orthonormal, sorted
/// ascending. Sign convention: each mode has positive integral; modes whose
/// integral vanishes (odd modes) are made positive at the first nonzero node.
class EigenBasis {
 public:
  EigenBasis(Mesh mesh, Eigen::VectorXd lambdas, Eigen::MatrixXd modes, Eigen::MatrixXd mass_modes);

  const Mesh& mesh() const { return mesh_; }
  int size() const { return static_cast<int>(lambdas_.size()); }
  const Eigen::VectorXd& lambdas() const { return lambdas_; }
  /// n_dofs x n, column k holds the nodal values of mode k.
  const Eigen::MatrixXd& modes() const { return modes_; }
  /// M * modes(), used for projections.
  const Eigen::MatrixXd& mass_modes() const { return mass_modes_; }

  /// Modal coefficients phi_k^T M u of a field.
  Eigen::VectorXd coefficients(const Field& u) const;
  /// Modal coefficients phi_k^T w of a dual element (w = sum_k w_k M phi_k).
  Eigen::VectorXd coefficients(const DualField& w) const;
  Field reconstruct(const Eigen::VectorXd& c) const;

 private:
  Mesh mesh_;
  Eigen::VectorXd lambdas_;
  Eigen::MatrixXd modes_;
  Eigen::MatrixXd mass_modes_;
};

/// Generalized symmetric-definite eigensolve through the Cholesky factor of M.
/// Throws NumericalError (with the worst residual) if a pair misses
/// ||A phi - lambda M phi|| <= 1e-9 ||A phi||.
EigenBasis solve_eigenbasis(const NonlocalForm& form, int n_modes);

/// Galerkin state u^n(t) = sum_k c_k(t) phi_k.
struct ModalState {
  Eigen::VectorXd c;
  double t = 0.0;
};

ModalState project(const EigenBasis& basis, const Field& u);
Field reconstruct(const EigenBasis& basis, const ModalState& s);

/// Exact b(u,v,w) = 1/3 [ (u v_x, w) - (u w_x, v) ] for piecewise-linear fields.
/// For v = u this equals (u u_x, w), and b(u,u,u) = 0 identically.
double skew_trilinear(const Field& u, const Field& v, const Field& w);

/// (u v_x, w) integrated exactly.
double advective_form(const Field& u, const Field& v, const Field& w);

/// T_kij = b(phi_i, phi_j, phi_k). Contracting with c_i c_j gives the modal
/// coefficients of P_n(u u_x).
class ConvectionTensor {
 public:
  ConvectionTensor(int n, Eigen::MatrixXd full);

  int size() const { return n_; }
  double operator()(int k, int i, int j) const { return full_(k, i + n_ * j); }

  /// sum_ij T_kij c_i c_j for each k.
  Eigen::VectorXd contract(const Eigen::VectorXd& c) const;
  /// sum_kij T_kij c_k c_i c_j.
  double cubic(const Eigen::VectorXd& c) const;
  /// Copy with every entry zero (linear-only runs).
  ConvectionTensor zeroed() const;

 private:
  int n_;
  Eigen::MatrixXd full_;    // n x n^2, column i + n j
  Eigen::MatrixXd packed_;  // n x n(n+1)/2, symmetric part over (i <= j)
  mutable Eigen::VectorXd pairs_;
};

ConvectionTensor convection_tensor(const EigenBasis& basis);

enum class Integrator {
  exponential_euler,  // first order
  etd_rk2,            // Cox-Matthews ETD2RK, second order
};

/// Exponential time differencing for dc/dt = -Lambda c + N(c),
/// N(c) = -T:(c c). The linear factor exp(-lambda_k dt) is exact.
class DeterministicStepper {
 public:
  DeterministicStepper(const EigenBasis& basis, const ConvectionTensor& tensor, double dt,
                       Integrator scheme = Integrator::etd_rk2);

  double dt() const { return dt_; }
  Eigen::VectorXd nonlinear(const Eigen::VectorXd& c) const;
  /// Advance in place; throws BlowUpError when ||c||_inf > 1e8 or non-finite.
  void step(ModalState& s) const;

 private:
  const EigenBasis& basis_;
  const ConvectionTensor& tensor_;
  double dt_;
  Integrator scheme_;
  Eigen::VectorXd decay_, phi1_, phi2_;
};

inline constexpr double kBlowUpThreshold = 1e8;

/// Throws BlowUpError when c is non-finite or exceeds kBlowUpThreshold.
void check_finite(const Eigen::VectorXd& c, double t, const char* where);

}  // namespace nlb
