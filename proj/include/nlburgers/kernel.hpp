#pragma once

#include <Eigen/Dense>
#include <iosfwd>

namespace nlb {

/// Order alpha of the nonlocal operator, 0 < alpha < 2.
class FractionalOrder {
 public:
  explicit FractionalOrder(double alpha);

  double value() const { return alpha_; }
  /// True when 1 < alpha < 2, the range covered by the existence theory.
  bool theorem_range() const { return alpha_ > 1.0 && alpha_ < 2.0; }

 private:
  double alpha_;
};

/// Uniform partition of D = (-1, 1) into n_cells cells. Degrees of freedom are
/// the interior nodes x_i = -1 + i h, i = 1..n_cells-1; the exterior (and the
/// two boundary nodes) carry the value zero and are never stored.
class Mesh {
 public:
  explicit Mesh(int n_cells);

  int n_cells() const { return n_cells_; }
  int n_dofs() const { return n_cells_ - 1; }
  double h() const { return 2.0 / n_cells_; }
  /// Coordinate of interior dof k (0-based), i.e. node k+1.
  double node(int k) const { return -1.0 + (k + 1) * h(); }

  bool operator==(const Mesh&) const = default;

 private:
  int n_cells_;
};

/// Piecewise-linear function on a Mesh, stored by its interior nodal values.
struct Field {
  Mesh mesh;
  Eigen::VectorXd values;

  Field(Mesh m, Eigen::VectorXd v);
  static Field zero(const Mesh& m) { return Field(m, Eigen::VectorXd::Zero(m.n_dofs())); }

  /// Nodal interpolant of f.
  template <class F>
  static Field interpolate(const Mesh& m, F&& f) {
    Eigen::VectorXd v(m.n_dofs());
    for (int k = 0; k < m.n_dofs(); ++k) v(k) = f(m.node(k));
    return Field(m, std::move(v));
  }

  /// Value of the piecewise-linear function at x (zero outside (-1, 1)).
  double operator()(double x) const;
};

/// Coefficients of a functional tested against the hat basis, e.g. A u.
struct DualField {
  Mesh mesh;
  Eigen::VectorXd values;

  DualField(Mesh m, Eigen::VectorXd v);
};

/// Exterior interaction weight rho(x) = 2 int_{D^c} |x-y|^{-1-alpha} dy
/// = (2/alpha) [(1+x)^{-alpha} + (1-x)^{-alpha}]. Throws DomainError for |x| >= 1.
double rho_weight(double x, FractionalOrder alpha);

/// Normalizing constant c_{1,s} of the fractional Laplacian with symbol
/// |xi|^{2s}, s = alpha/2.
double fractional_laplacian_constant(FractionalOrder alpha);

/// 2^alpha Gamma(alpha/2+1) Gamma((alpha+1)/2) / Gamma(1/2): the constant value of
/// the symbol-normalized (-Delta)^{alpha/2} applied to (1-x^2)_+^{alpha/2}.
double getoor_constant(FractionalOrder alpha);

/// The assembled form uses kernel constant 1 in front of the principal-value
/// integral, so its operator is 2/c_{1,alpha/2} times the symbol-normalized one.
/// Multiplying a strong image by this factor converts to the symbol scale.
double symbol_scale_factor(FractionalOrder alpha);

/// Quadrature orders for the assembly. Singular pieces use Gauss-Jacobi rules
/// that absorb the exact power behaviour, so the polynomial remainder is
/// integrated exactly; smooth pieces use Gauss-Legendre.
struct KernelQuadrature {
  int singular_order = 12;
  int smooth_order = 12;
  int inner_order = 3;
  int weight_order = 12;

  KernelQuadrature doubled() const {
    return {2 * singular_order, 2 * smooth_order, 2 * inner_order, 2 * weight_order};
  }
};

/// B_int(phi_i, phi_j) = int_D int_D (phi_i(x)-phi_i(y))(phi_j(x)-phi_j(y)) |x-y|^{-1-alpha}.
Eigen::MatrixXd assemble_interaction(const Mesh& mesh, FractionalOrder alpha,
                                     const KernelQuadrature& q = {});

/// int_D rho phi_i phi_j.
Eigen::MatrixXd assemble_weight(const Mesh& mesh, FractionalOrder alpha,
                                const KernelQuadrature& q = {});

/// Exact P1 mass matrix (tridiagonal, stored dense).
Eigen::MatrixXd assemble_mass(const Mesh& mesh);

/// Stiffness/mass pair of the weighted nonlocal form. Immutable after
/// construction and safe to share between threads.
class NonlocalForm {
 public:
  NonlocalForm(Mesh mesh, FractionalOrder alpha, Eigen::MatrixXd stiffness, Eigen::MatrixXd mass);

  const Mesh& mesh() const { return mesh_; }
  FractionalOrder alpha() const { return alpha_; }
  const Eigen::MatrixXd& A() const { return A_; }
  const Eigen::MatrixXd& M() const { return M_; }

  /// u^T A v.
  double bilinear(const Field& u, const Field& v) const;
  /// Solve M w = b for the tridiagonal mass matrix.
  Field mass_solve(const DualField& b) const;

 private:
  Mesh mesh_;
  FractionalOrder alpha_;
  Eigen::MatrixXd A_;
  Eigen::MatrixXd M_;
};

NonlocalForm assemble_form(const Mesh& mesh, FractionalOrder alpha, const KernelQuadrature& q = {});

/// A u, the weak image of the operator applied to u.
DualField apply_operator(const NonlocalForm& form, const Field& u);

/// M^{-1} A u, the discrete strong image (in the form's own normalization).
Field strong_image(const NonlocalForm& form, const Field& u);

/// Dense matrix dump: row-major, one row per line, %.16e.
void write_matrix(std::ostream& os, const Eigen::MatrixXd& m);

}  // namespace nlb
