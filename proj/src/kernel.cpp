#include "nlburgers/kernel.hpp"

#include <array>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <ostream>
#include <string>
#include <vector>

#include "nlburgers/errors.hpp"
#include "nlburgers/quadrature.hpp"

namespace nlb {

FractionalOrder::FractionalOrder(double alpha) : alpha_(alpha) {
  if (!(alpha > 0.0 && alpha < 2.0))
    throw DomainError("fractional order alpha=" + std::to_string(alpha) + " outside (0,2)");
}

Mesh::Mesh(int n_cells) : n_cells_(n_cells) {
  if (n_cells < 2) throw DomainError("mesh needs at least 2 cells");
}

Field::Field(Mesh m, Eigen::VectorXd v) : mesh(m), values(std::move(v)) {
  if (values.size() != mesh.n_dofs())
    throw DimensionError("field has " + std::to_string(values.size()) + " values, mesh has " +
                         std::to_string(mesh.n_dofs()) + " dofs");
}

double Field::operator()(double x) const {
  if (!(x > -1.0 && x < 1.0)) return 0.0;
  const double s = (x + 1.0) / mesh.h();
  int c = static_cast<int>(std::floor(s));
  if (c >= mesh.n_cells()) c = mesh.n_cells() - 1;
  const double xi = s - c;
  auto nodal = [&](int p) { return (p <= 0 || p >= mesh.n_cells()) ? 0.0 : values(p - 1); };
  return (1.0 - xi) * nodal(c) + xi * nodal(c + 1);
}

DualField::DualField(Mesh m, Eigen::VectorXd v) : mesh(m), values(std::move(v)) {
  if (values.size() != mesh.n_dofs()) throw DimensionError("dual field size does not match mesh");
}

double rho_weight(double x, FractionalOrder alpha) {
  if (!(std::abs(x) < 1.0))
    throw DomainError("rho_weight: x=" + std::to_string(x) + " is not inside (-1,1)");
  const double a = alpha.value();
  return (2.0 / a) * (std::pow(1.0 + x, -a) + std::pow(1.0 - x, -a));
}

double fractional_laplacian_constant(FractionalOrder alpha) {
  const double s = 0.5 * alpha.value();
  return s * std::pow(4.0, s) * std::tgamma(0.5 + s) /
         (std::sqrt(std::numbers::pi) * std::tgamma(1.0 - s));
}

double getoor_constant(FractionalOrder alpha) {
  const double a = alpha.value();
  return std::pow(2.0, a) * std::tgamma(0.5 * a + 1.0) * std::tgamma(0.5 * (a + 1.0)) /
         std::sqrt(std::numbers::pi);
}

double symbol_scale_factor(FractionalOrder alpha) {
  return 0.5 * fractional_laplacian_constant(alpha);
}

namespace {

// Affine function a0 + ax xi + ay eta on the reference square of a cell pair.
struct Affine {
  double a0, ax, ay;
  double operator()(double xi, double eta) const { return a0 + ax * xi + ay * eta; }
};

struct PairDof {
  int node;  // global node index 0..n_cells
  Affine f;  // phi_node(x) - phi_node(y) in reference coordinates
};

// Dof functions for x in cell c, y in cell c+d.
std::vector<PairDof> pair_dofs(int c, int d) {
  std::vector<PairDof> out;
  if (d == 0) {
    out.push_back({c, {0.0, -1.0, 1.0}});
    out.push_back({c + 1, {0.0, 1.0, -1.0}});
  } else if (d == 1) {
    out.push_back({c, {1.0, -1.0, 0.0}});
    out.push_back({c + 1, {-1.0, 1.0, 1.0}});
    out.push_back({c + 2, {0.0, 0.0, -1.0}});
  } else {
    out.push_back({c, {1.0, -1.0, 0.0}});
    out.push_back({c + 1, {0.0, 1.0, 0.0}});
    out.push_back({c + d, {-1.0, 0.0, 1.0}});
    out.push_back({c + d + 1, {0.0, 0.0, -1.0}});
  }
  return out;
}

// Reference integrals int int f_p f_q |xi - eta - d|^{-1-alpha} over [0,1]^2 for
// the dofs of an offset-d pair. The scale h^{1-alpha} is applied by the caller.
//
// With tau = eta - xi + d = (y-x)/h and sigma = tau - d, the slice of the
// square at fixed tau is xi in [max(0,-sigma), min(1,1-sigma)]. Along a slice the
// integrand is quadratic, so the inner rule is exact; the outer integral is
// Q(tau) |tau|^{-1-alpha}. Near tau = 0 (d = 0 or 1) every dof function
// vanishes linearly, and Q(tau) = |tau|^k R(tau) with k = 2 (same cell) or
// k = 3 (shared vertex), R polynomial. Those pieces use Gauss-Jacobi with the
// weight |tau|^{k-1-alpha}.
Eigen::MatrixXd offset_block(int d, double alpha, const KernelQuadrature& q) {
  const auto dofs = pair_dofs(0, d);
  const int nd = static_cast<int>(dofs.size());
  const quad::Rule inner = quad::gauss_legendre(q.inner_order);

  auto slice = [&](double tau, Eigen::MatrixXd& Q) {
    const double sigma = tau - d;
    const double lo = std::max(0.0, -sigma), hi = std::min(1.0, 1.0 - sigma);
    Q.setZero();
    if (hi <= lo) return;
    const double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
    for (std::size_t g = 0; g < inner.size(); ++g) {
      const double xi = mid + half * inner.nodes[g];
      const double eta = xi + sigma;
      std::array<double, 4> fv{};
      for (int p = 0; p < nd; ++p) fv[p] = dofs[p].f(xi, eta);
      const double w = half * inner.weights[g];
      for (int p = 0; p < nd; ++p)
        for (int r = 0; r < nd; ++r) Q(p, r) += w * fv[p] * fv[r];
    }
  };

  Eigen::MatrixXd E = Eigen::MatrixXd::Zero(nd, nd);
  Eigen::MatrixXd Q(nd, nd);

  auto smooth_piece = [&](double lo, double hi) {
    const auto rule = quad::mapped_legendre(q.smooth_order, lo, hi);
    for (std::size_t g = 0; g < rule.nodes.size(); ++g) {
      const double tau = rule.nodes[g];
      slice(tau, Q);
      E += rule.weights[g] * std::pow(std::abs(tau), -1.0 - alpha) * Q;
    }
  };
  // Piece [0,1] in |tau| with the singularity at tau = 0; sign selects the side.
  auto singular_piece = [&](int k, double sign) {
    const auto rule = quad::endpoint_power_rule(q.singular_order, k - 1.0 - alpha, 1.0);
    for (std::size_t g = 0; g < rule.nodes.size(); ++g) {
      const double r = rule.nodes[g];
      slice(sign * r, Q);
      E += rule.weights[g] * std::pow(r, -k) * Q;
    }
  };

  if (d == 0) {
    singular_piece(2, 1.0);
    singular_piece(2, -1.0);
  } else if (d == 1) {
    singular_piece(3, 1.0);
    smooth_piece(1.0, 2.0);
  } else {
    smooth_piece(d - 1.0, d);
    smooth_piece(d, d + 1.0);
  }
  for (int p = 0; p < nd; ++p)
    for (int r = p + 1; r < nd; ++r) E(r, p) = E(p, r);
  return E;
}

void mirror_upper(Eigen::MatrixXd& m) {
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = i + 1; j < m.cols(); ++j) m(j, i) = m(i, j);
}

}  // namespace

Eigen::MatrixXd assemble_interaction(const Mesh& mesh, FractionalOrder alpha,
                                     const KernelQuadrature& q) {
  if (mesh.n_cells() < 4) throw DomainError("assemble_form: need n_cells >= 4");
  const int N = mesh.n_cells();
  const double a = alpha.value();
  const double scale = std::pow(mesh.h(), 1.0 - a);
  Eigen::MatrixXd G = Eigen::MatrixXd::Zero(mesh.n_dofs(), mesh.n_dofs());

  for (int d = 0; d < N; ++d) {
    Eigen::MatrixXd E = offset_block(d, a, q);
    if (!E.allFinite())
      throw NumericalError("kernel quadrature produced non-finite values on cell-pair panel d=" +
                           std::to_string(d));
    // Ordered pairs (c, c+d) and (c+d, c) contribute equally.
    E *= (d == 0 ? 1.0 : 2.0) * scale;
    const auto dofs = pair_dofs(0, d);
    for (int c = 0; c + d < N; ++c) {
      for (std::size_t p = 0; p < dofs.size(); ++p) {
        const int np = dofs[p].node + c;
        if (np == 0 || np == N) continue;
        for (std::size_t r = 0; r < dofs.size(); ++r) {
          const int nr = dofs[r].node + c;
          if (nr == 0 || nr == N || nr < np) continue;
          G(np - 1, nr - 1) += E(p, r);
        }
      }
    }
  }
  mirror_upper(G);
  return G;
}

Eigen::MatrixXd assemble_weight(const Mesh& mesh, FractionalOrder alpha, const KernelQuadrature& q) {
  if (mesh.n_cells() < 4) throw DomainError("assemble_form: need n_cells >= 4");
  const int N = mesh.n_cells();
  const double a = alpha.value();
  const double h = mesh.h();
  // rho(x) on cell c at x = -1 + (c + xi) h is
  // (2/a) h^{-a} [(c + xi)^{-a} + (N - c - xi)^{-a}].
  const double pref = (2.0 / a) * std::pow(h, -a) * h;  // includes dx = h dxi
  const auto smooth = quad::mapped_legendre(q.weight_order, 0.0, 1.0);
  // In the two boundary cells only the hat of the interior endpoint survives; it
  // vanishes linearly at the boundary, so the singular term is xi^{2-a}.
  const auto endpoint = quad::endpoint_power_rule(q.weight_order, 2.0 - a, 1.0);

  Eigen::MatrixXd W = Eigen::MatrixXd::Zero(mesh.n_dofs(), mesh.n_dofs());
  for (int c = 0; c < N; ++c) {
    // local mass against each of the two weight terms
    Eigen::Matrix2d loc = Eigen::Matrix2d::Zero();
    auto add = [&](double w, double xi) {
      const double s0 = 1.0 - xi, s1 = xi;
      loc(0, 0) += w * s0 * s0;
      loc(0, 1) += w * s0 * s1;
      loc(1, 1) += w * s1 * s1;
    };
    // left boundary term (c + xi)^{-a}
    if (c == 0) {
      for (std::size_t g = 0; g < endpoint.nodes.size(); ++g) loc(1, 1) += endpoint.weights[g];
    } else {
      for (std::size_t g = 0; g < smooth.nodes.size(); ++g)
        add(smooth.weights[g] * std::pow(c + smooth.nodes[g], -a), smooth.nodes[g]);
    }
    // right boundary term (N - c - xi)^{-a}
    if (c == N - 1) {
      for (std::size_t g = 0; g < endpoint.nodes.size(); ++g) loc(0, 0) += endpoint.weights[g];
    } else {
      for (std::size_t g = 0; g < smooth.nodes.size(); ++g)
        add(smooth.weights[g] * std::pow(N - c - smooth.nodes[g], -a), smooth.nodes[g]);
    }
    loc *= pref;
    const int nodes[2] = {c, c + 1};
    for (int p = 0; p < 2; ++p)
      for (int r = p; r < 2; ++r) {
        const int np = nodes[p], nr = nodes[r];
        if (np == 0 || np == N || nr == 0 || nr == N) continue;
        W(np - 1, nr - 1) += loc(p, r);
      }
  }
  mirror_upper(W);
  return W;
}

Eigen::MatrixXd assemble_mass(const Mesh& mesh) {
  const int n = mesh.n_dofs();
  const double h = mesh.h();
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    M(i, i) = 2.0 * h / 3.0;
    if (i + 1 < n) M(i, i + 1) = M(i + 1, i) = h / 6.0;
  }
  return M;
}

NonlocalForm::NonlocalForm(Mesh mesh, FractionalOrder alpha, Eigen::MatrixXd stiffness,
                           Eigen::MatrixXd mass)
    : mesh_(mesh), alpha_(alpha), A_(std::move(stiffness)), M_(std::move(mass)) {
  if (A_.rows() != mesh_.n_dofs() || A_.cols() != mesh_.n_dofs() || M_.rows() != A_.rows() ||
      M_.cols() != A_.cols())
    throw DimensionError("NonlocalForm: matrix sizes do not match mesh");
}

double NonlocalForm::bilinear(const Field& u, const Field& v) const {
  if (!(u.mesh == mesh_) || !(v.mesh == mesh_)) throw DimensionError("bilinear: mesh mismatch");
  return u.values.dot(A_ * v.values);
}

Field NonlocalForm::mass_solve(const DualField& b) const {
  if (!(b.mesh == mesh_)) throw DimensionError("mass_solve: mesh mismatch");
  // Thomas algorithm on the symmetric tridiagonal mass matrix.
  const int n = mesh_.n_dofs();
  Eigen::VectorXd cp(n), dp(n);
  double diag = M_(0, 0);
  cp(0) = n > 1 ? M_(0, 1) / diag : 0.0;
  dp(0) = b.values(0) / diag;
  for (int i = 1; i < n; ++i) {
    const double sub = M_(i, i - 1);
    diag = M_(i, i) - sub * cp(i - 1);
    cp(i) = i + 1 < n ? M_(i, i + 1) / diag : 0.0;
    dp(i) = (b.values(i) - sub * dp(i - 1)) / diag;
  }
  Eigen::VectorXd x(n);
  x(n - 1) = dp(n - 1);
  for (int i = n - 2; i >= 0; --i) x(i) = dp(i) - cp(i) * x(i + 1);
  return Field(mesh_, std::move(x));
}

NonlocalForm assemble_form(const Mesh& mesh, FractionalOrder alpha, const KernelQuadrature& q) {
  Eigen::MatrixXd A = assemble_interaction(mesh, alpha, q);
  A += assemble_weight(mesh, alpha, q);
  return NonlocalForm(mesh, alpha, std::move(A), assemble_mass(mesh));
}

DualField apply_operator(const NonlocalForm& form, const Field& u) {
  if (!(u.mesh == form.mesh())) throw DimensionError("apply_operator: mesh mismatch");
  return DualField(form.mesh(), form.A() * u.values);
}

Field strong_image(const NonlocalForm& form, const Field& u) {
  return form.mass_solve(apply_operator(form, u));
}

void write_matrix(std::ostream& os, const Eigen::MatrixXd& m) {
  char buf[32];
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      std::snprintf(buf, sizeof buf, "%.16e", m(i, j));
      if (j) os << ' ';
      os << buf;
    }
    os << '\n';
  }
}

}  // namespace nlb
