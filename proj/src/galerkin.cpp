#include "nlburgers/galerkin.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <sstream>
#include <string>

#include "nlburgers/errors.hpp"

namespace nlb {

EigenBasis::EigenBasis(Mesh mesh, Eigen::VectorXd lambdas, Eigen::MatrixXd modes,
                       Eigen::MatrixXd mass_modes)
    : mesh_(mesh),
      lambdas_(std::move(lambdas)),
      modes_(std::move(modes)),
      mass_modes_(std::move(mass_modes)) {}

Eigen::VectorXd EigenBasis::coefficients(const Field& u) const {
  if (!(u.mesh == mesh_)) throw DimensionError("EigenBasis::coefficients: mesh mismatch");
  return mass_modes_.transpose() * u.values;
}

Eigen::VectorXd EigenBasis::coefficients(const DualField& w) const {
  if (!(w.mesh == mesh_)) throw DimensionError("EigenBasis::coefficients: mesh mismatch");
  return modes_.transpose() * w.values;
}

Field EigenBasis::reconstruct(const Eigen::VectorXd& c) const {
  if (c.size() != size()) throw DimensionError("EigenBasis::reconstruct: wrong coefficient count");
  return Field(mesh_, modes_ * c);
}

EigenBasis solve_eigenbasis(const NonlocalForm& form, int n_modes) {
  const int nd = form.mesh().n_dofs();
  if (n_modes < 1 || n_modes > nd)
    throw DomainError("solve_eigenbasis: n_modes=" + std::to_string(n_modes) + " must be in [1, " +
                      std::to_string(nd) + "]");

  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> ges(
      form.A(), form.M(), Eigen::ComputeEigenvectors | Eigen::Ax_lBx);
  if (ges.info() != Eigen::Success) throw NumericalError("solve_eigenbasis: eigen-solver failed");

  Eigen::VectorXd lambdas = ges.eigenvalues().head(n_modes);
  Eigen::MatrixXd modes = ges.eigenvectors().leftCols(n_modes);

  for (int k = 0; k < n_modes; ++k) {
    auto v = modes.col(k);
    const double mean = v.sum();
    const double scale = v.cwiseAbs().sum();
    double sign = 1.0;
    if (std::abs(mean) > 1e-8 * scale) {
      sign = mean > 0 ? 1.0 : -1.0;
    } else {
      const double cut = 1e-8 * v.cwiseAbs().maxCoeff();
      for (int i = 0; i < nd; ++i)
        if (std::abs(v(i)) > cut) {
          sign = v(i) > 0 ? 1.0 : -1.0;
          break;
        }
    }
    v *= sign;
  }

  double worst = 0.0;
  int worst_k = 0;
  for (int k = 0; k < n_modes; ++k) {
    const Eigen::VectorXd Av = form.A() * modes.col(k);
    const double res = (Av - lambdas(k) * (form.M() * modes.col(k))).norm() / Av.norm();
    if (res > worst) worst = res, worst_k = k;
  }
  if (!(worst <= 1e-9) || !(lambdas(0) > 0.0)) {
    std::ostringstream msg;
    msg << "solve_eigenbasis: residual " << worst << " at mode " << worst_k + 1
        << " exceeds 1e-9 (lambda_1 = " << lambdas(0) << ")";
    throw NumericalError(msg.str());
  }
  Eigen::MatrixXd mass_modes = form.M() * modes;
  return EigenBasis(form.mesh(), std::move(lambdas), std::move(modes), std::move(mass_modes));
}

ModalState project(const EigenBasis& basis, const Field& u) { return {basis.coefficients(u), 0.0}; }

Field reconstruct(const EigenBasis& basis, const ModalState& s) { return basis.reconstruct(s.c); }

namespace {

// Nodal value of node p (0..n_cells) including the zero boundary nodes.
inline double nodal(const Field& f, int p) {
  return (p <= 0 || p >= f.mesh.n_cells()) ? 0.0 : f.values(p - 1);
}

}  // namespace

double advective_form(const Field& u, const Field& v, const Field& w) {
  if (!(u.mesh == v.mesh) || !(u.mesh == w.mesh)) throw DimensionError("advective_form: mesh mismatch");
  const int N = u.mesh.n_cells();
  const double h = u.mesh.h();
  double s = 0.0;
  for (int c = 0; c < N; ++c) {
    const double ua = nodal(u, c), ub = nodal(u, c + 1);
    const double wa = nodal(w, c), wb = nodal(w, c + 1);
    const double slope = (nodal(v, c + 1) - nodal(v, c)) / h;
    s += slope * h / 6.0 * (2.0 * ua * wa + ua * wb + ub * wa + 2.0 * ub * wb);
  }
  return s;
}

double skew_trilinear(const Field& u, const Field& v, const Field& w) {
  return (advective_form(u, v, w) - advective_form(u, w, v)) / 3.0;
}

ConvectionTensor::ConvectionTensor(int n, Eigen::MatrixXd full) : n_(n), full_(std::move(full)) {
  if (full_.rows() != n_ || full_.cols() != n_ * n_) throw DimensionError("ConvectionTensor: bad shape");
  packed_.resize(n_, n_ * (n_ + 1) / 2);
  int col = 0;
  for (int i = 0; i < n_; ++i)
    for (int j = i; j < n_; ++j, ++col)
      packed_.col(col) = (i == j) ? full_.col(i + n_ * i).eval()
                                  : (full_.col(i + n_ * j) + full_.col(j + n_ * i)).eval();
  pairs_.resize(n_ * (n_ + 1) / 2);
}

Eigen::VectorXd ConvectionTensor::contract(const Eigen::VectorXd& c) const {
  if (c.size() != n_) throw DimensionError("ConvectionTensor::contract: size mismatch");
  int col = 0;
  for (int i = 0; i < n_; ++i)
    for (int j = i; j < n_; ++j, ++col) pairs_(col) = c(i) * c(j);
  return packed_ * pairs_;
}

double ConvectionTensor::cubic(const Eigen::VectorXd& c) const { return c.dot(contract(c)); }

ConvectionTensor ConvectionTensor::zeroed() const {
  return ConvectionTensor(n_, Eigen::MatrixXd::Zero(n_, n_ * n_));
}

ConvectionTensor convection_tensor(const EigenBasis& basis) {
  const Mesh& mesh = basis.mesh();
  const int N = mesh.n_cells();
  const int n = basis.size();
  const double h = mesh.h();
  // Rows c: nodal values of every mode at the left/right end of cell c, and slopes.
  Eigen::MatrixXd left = Eigen::MatrixXd::Zero(N, n), right = Eigen::MatrixXd::Zero(N, n);
  for (int c = 0; c < N; ++c) {
    if (c >= 1) left.row(c) = basis.modes().row(c - 1);
    if (c + 1 <= N - 1) right.row(c) = basis.modes().row(c);
  }
  const Eigen::MatrixXd slope = (right - left) / h;

  // X[j](i,k) = (phi_i phi_j', phi_k) = sum_c slope_j(c) int_c phi_i phi_k.
  std::vector<Eigen::MatrixXd> X(n);
  for (int j = 0; j < n; ++j) {
    const Eigen::VectorXd s = slope.col(j) * (h / 6.0);
    const Eigen::MatrixXd Ls = s.asDiagonal() * left;
    const Eigen::MatrixXd Rs = s.asDiagonal() * right;
    X[j] = 2.0 * left.transpose() * Ls + left.transpose() * Rs + right.transpose() * Ls +
           2.0 * right.transpose() * Rs;
  }
  Eigen::MatrixXd full(n, n * n);
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) full(k, i + n * j) = (X[j](i, k) - X[k](i, j)) / 3.0;
  return ConvectionTensor(n, std::move(full));
}

void check_finite(const Eigen::VectorXd& c, double t, const char* where) {
  const double m = c.size() ? c.cwiseAbs().maxCoeff() : 0.0;
  if (!c.allFinite() || m > kBlowUpThreshold) {
    std::ostringstream msg;
    msg << where << ": blow-up at t=" << t << " (|c|_inf=" << m << ")";
    throw BlowUpError(msg.str(), t, m);
  }
}

namespace {

double phi1(double z) { return std::abs(z) < 1e-5 ? 1.0 + z / 2.0 + z * z / 6.0 : std::expm1(z) / z; }

double phi2(double z) {
  if (std::abs(z) < 1e-2) return 0.5 + z * (1.0 / 6.0 + z * (1.0 / 24.0 + z * (1.0 / 120.0 + z / 720.0)));
  return (std::expm1(z) - z) / (z * z);
}

}  // namespace

DeterministicStepper::DeterministicStepper(const EigenBasis& basis, const ConvectionTensor& tensor,
                                           double dt, Integrator scheme)
    : basis_(basis), tensor_(tensor), dt_(dt), scheme_(scheme) {
  if (!(dt > 0.0)) throw DomainError("time step must be positive");
  if (tensor.size() != basis.size()) throw DimensionError("tensor and basis sizes differ");
  const int n = basis.size();
  decay_.resize(n);
  phi1_.resize(n);
  phi2_.resize(n);
  for (int k = 0; k < n; ++k) {
    const double z = -basis.lambdas()(k) * dt;
    decay_(k) = std::exp(z);
    phi1_(k) = dt * phi1(z);
    phi2_(k) = dt * phi2(z);
  }
}

Eigen::VectorXd DeterministicStepper::nonlinear(const Eigen::VectorXd& c) const {
  return -tensor_.contract(c);
}

void DeterministicStepper::step(ModalState& s) const {
  const Eigen::VectorXd n0 = nonlinear(s.c);
  Eigen::VectorXd a = decay_.cwiseProduct(s.c) + phi1_.cwiseProduct(n0);
  if (scheme_ == Integrator::etd_rk2) a += phi2_.cwiseProduct(nonlinear(a) - n0);
  s.c = std::move(a);
  s.t += dt_;
  check_finite(s.c, s.t, "deterministic step");
}

}  // namespace nlb
