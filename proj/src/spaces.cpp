#include "nlburgers/spaces.hpp"

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>

#include "nlburgers/errors.hpp"
#include "nlburgers/quadrature.hpp"

namespace nlb {

namespace {

inline double nodal(const Field& f, int p) {
  return (p <= 0 || p >= f.mesh.n_cells()) ? 0.0 : f.values(p - 1);
}

// Radial integrals for the singular cell pairs on the unit reference square:
//   same cell:  int int |xi-eta|^{1-a}                          = 2 int_0^1 r^{1-a} (1-r) dr
//   shared vertex, with A = distance of x from the vertex and B = distance of y:
//     j_aa = int int A^2 (A+B)^{-1-a},  j_ab = int int A B (A+B)^{-1-a}.
// Integrated with tanh-sinh in r = A+B and an exact Gauss rule along the
// segment A+B = r.
struct SingularMoments {
  double same, j_aa, j_ab;
};

SingularMoments singular_moments(double a) {
  boost::math::quadrature::tanh_sinh<double> ts;
  SingularMoments m{};
  m.same = 2.0 * ts.integrate([a](double r) { return std::pow(r, 1.0 - a) * (1.0 - r); }, 0.0, 1.0);

  const quad::Rule gl = quad::gauss_legendre(4);
  // Segment {A+B = r} inside [0,1]^2 parametrized by A in [lo, hi].
  auto segment = [&](double r, auto&& g) {
    const double lo = std::max(0.0, r - 1.0), hi = std::min(1.0, r);
    const double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
    double s = 0.0;
    for (std::size_t i = 0; i < gl.size(); ++i) {
      const double A = mid + half * gl.nodes[i];
      s += half * gl.weights[i] * g(A, r - A);
    }
    return s;
  };
  auto radial = [&](auto&& g) {
    // r in (0,1]: A = r t, B = r (1-t) turns the segment integral into r^3 * poly.
    const double inner = segment(1.0, [&](double t, double u) { return g(t, u); });
    const double near = inner * ts.integrate([a](double r) { return std::pow(r, 2.0 - a); }, 0.0, 1.0);
    const double far = ts.integrate(
        [&](double r) { return std::pow(r, -1.0 - a) * segment(r, g); }, 1.0, 2.0);
    return near + far;
  };
  m.j_aa = radial([](double A, double) { return A * A; });
  m.j_ab = radial([](double A, double B) { return A * B; });
  return m;
}

}  // namespace

double gagliardo_seminorm_sq(const Field& u, FractionalOrder alpha) {
  const Mesh& mesh = u.mesh;
  const int N = mesh.n_cells();
  const double h = mesh.h();
  const double a = alpha.value();
  const SingularMoments sm = singular_moments(a);
  const double hs = std::pow(h, 3.0 - a);

  std::vector<double> slope(N);
  for (int c = 0; c < N; ++c) slope[c] = (nodal(u, c + 1) - nodal(u, c)) / h;

  double total = 0.0;
  for (int c = 0; c < N; ++c) total += slope[c] * slope[c] * hs * sm.same;
  // u(x)-u(y) = -(s_c A + s_{c+1} B) h for x left and y right of the shared vertex;
  // both orderings of the pair contribute.
  for (int c = 0; c + 1 < N; ++c) {
    const double sl = slope[c], sr = slope[c + 1];
    total += 2.0 * hs * ((sl * sl + sr * sr) * sm.j_aa + 2.0 * sl * sr * sm.j_ab);
  }

  // Separated pairs: tensor Gauss-Legendre with direct evaluation of u.
  const auto near_rule = quad::gauss_legendre(10);
  const auto far_rule = quad::gauss_legendre(6);
  std::vector<double> ux, xs;
  for (int d = 2; d < N; ++d) {
    const auto& rule = d <= 4 ? near_rule : far_rule;
    const int q = static_cast<int>(rule.size());
    for (int c = 0; c + d < N; ++c) {
      const int c2 = c + d;
      double pair = 0.0;
      for (int i = 0; i < q; ++i) {
        const double xi = 0.5 * (1.0 + rule.nodes[i]);
        const double x = -1.0 + (c + xi) * h;
        const double ux_v = (1.0 - xi) * nodal(u, c) + xi * nodal(u, c + 1);
        for (int j = 0; j < q; ++j) {
          const double eta = 0.5 * (1.0 + rule.nodes[j]);
          const double y = -1.0 + (c2 + eta) * h;
          const double uy_v = (1.0 - eta) * nodal(u, c2) + eta * nodal(u, c2 + 1);
          const double diff = ux_v - uy_v;
          pair += rule.weights[i] * rule.weights[j] * diff * diff * std::pow(y - x, -1.0 - a);
        }
      }
      total += 2.0 * pair * 0.25 * h * h;
    }
  }
  return total;
}

double weighted_l2_sq(const Field& u, FractionalOrder alpha) {
  const Mesh& mesh = u.mesh;
  const int N = mesh.n_cells();
  const double h = mesh.h();
  const double a = alpha.value();
  boost::math::quadrature::tanh_sinh<double> ts;

  // Boundary cells: u vanishes linearly at the boundary node; written in the
  // distance t = h xi to the boundary to avoid cancellation in 1 +/- x.
  auto boundary = [&](double u_inner) {
    if (u_inner == 0.0) return 0.0;
    return h * ts.integrate(
                   [&](double xi) {
                     // rho u^2 with the t^{-a} xi^2 product merged to stay finite near 0
                     const double t = h * xi;
                     const double near = std::pow(h, -a) * std::pow(xi, 2.0 - a);
                     const double far = std::pow(2.0 - t, -a) * xi * xi;
                     return (2.0 / a) * u_inner * u_inner * (near + far);
                   },
                   0.0, 1.0);
  };
  double total = boundary(nodal(u, 1)) + boundary(nodal(u, N - 1));

  const auto rule = quad::gauss_legendre(16);
  for (int c = 1; c + 1 < N; ++c) {
    const double ul = nodal(u, c), ur = nodal(u, c + 1);
    double cell = 0.0;
    for (std::size_t g = 0; g < rule.size(); ++g) {
      const double xi = 0.5 * (1.0 + rule.nodes[g]);
      const double x = -1.0 + (c + xi) * h;
      const double v = (1.0 - xi) * ul + xi * ur;
      cell += rule.weights[g] * rho_weight(x, alpha) * v * v;
    }
    total += 0.5 * h * cell;
  }
  return total;
}

NormReport norms(const Field& u, const NonlocalForm& form) {
  if (!(u.mesh == form.mesh())) throw DimensionError("norms: mesh mismatch");
  NormReport r;
  r.l2 = std::sqrt(std::max(0.0, u.values.dot(form.M() * u.values)));
  r.v_norm = std::sqrt(std::max(0.0, u.values.dot(form.A() * u.values)));
  r.gagliardo = std::sqrt(std::max(0.0, gagliardo_seminorm_sq(u, form.alpha())));
  r.weighted_l2 = std::sqrt(std::max(0.0, weighted_l2_sq(u, form.alpha())));
  return r;
}

SpectralScale::SpectralScale(const EigenBasis& basis, FractionalOrder alpha)
    : basis_(&basis), alpha_(alpha) {}

Eigen::VectorXd SpectralScale::weights(double s) const {
  const double p = 2.0 * s / alpha_.value();
  return basis_->lambdas().array().pow(p).matrix();
}

double SpectralScale::norm(const Eigen::VectorXd& modal, double s) const {
  if (modal.size() != basis_->size()) throw DimensionError("SpectralScale::norm: size mismatch");
  return std::sqrt(modal.cwiseAbs2().dot(weights(s)));
}

double dual_norm(const DualField& w, const SpectralScale& scale, double s) {
  if (!(s > 0.0)) throw DomainError("dual_norm: order s must be positive");
  return scale.norm(scale.basis().coefficients(w), -s);
}

double operator_dual_bound_check(const Field& u, const NonlocalForm& form, const SpectralScale& scale) {
  const double v = std::sqrt(std::max(0.0, u.values.dot(form.A() * u.values)));
  if (!(v > 0.0)) throw DomainError("operator_dual_bound_check: ratio undefined for u = 0");
  return dual_norm(apply_operator(form, u), scale, 0.5 * form.alpha().value()) / v;
}

}  // namespace nlb
