#pragma once

#include <array>
#include <string>
#include <vector>

#include "atg/develop.hpp"

namespace atg::g2fib {

/// Element of Lambda^2 R^4; components ordered (u12, u13, u14, u23, u24, u34).
using Wedge2 = Eigen::Matrix<double, 6, 1>;

// coefficient of dx^{1234} in u ^ v (symmetric, signature (3,3))
double wedge_pair(const Wedge2& u, const Wedge2& v);

// isometry from diag(1,1,1,-1,-1,-1) coordinates onto Lambda^2 R^4 using the
// normalized self-dual / anti-self-dual basis
Wedge2 from_r33(const Eigen::Matrix<double, 6, 1>& v);

// the self-dual generators omega_1 = dx12+dx34, omega_2 = dx13-dx24,
// omega_3 = -dx14-dx23
Wedge2 sd_generator(int k);

struct Grid3D {
  int n1 = 0, n2 = 0, n3 = 0;
  double o1 = 0, o2 = 0, o3 = 0;
  double d1 = 0, d2 = 0, d3 = 0;
  int size() const { return n1 * n2 * n3; }
  int node(int i, int j, int k) const { return (k * n2 + j) * n1 + i; }
  double w(int axis, int idx) const {
    return axis == 0 ? o1 + idx * d1 : axis == 1 ? o2 + idx * d2 : o3 + idx * d3;
  }
  bool interior(int i, int j, int k, int m = 1) const {
    return i >= m && j >= m && k >= m && i < n1 - m && j < n2 - m && k < n3 - m;
  }
};

enum class Variant { Compact, Split };

/// Sampled map u : M^3 -> Lambda^2 R^4 with the fiber volume tau.
struct ImmersionField3D {
  Grid3D grid;
  std::vector<Wedge2> u;
  double tau = 1.0;
  Variant variant = Variant::Compact;

  const Wedge2& at(int i, int j, int k) const { return u[grid.node(i, j, k)]; }
  Wedge2& at(int i, int j, int k) { return u[grid.node(i, j, k)]; }
};

struct MetricField3D {
  Grid3D grid;
  std::vector<Eigen::Matrix3d> h;
  std::vector<int> plus_count;  // positive eigenvalues per node
  std::vector<int> degenerate_nodes;

  const Eigen::Matrix3d& at(int i, int j, int k) const { return h[grid.node(i, j, k)]; }
};

// h_ij = wedge_pair(d_i u, d_j u) / (2 tau); classifies definiteness per node
MetricField3D induced_metric(const ImmersionField3D& f);

/// tau^gamma = g^{ij}(d2_ij u - Gamma^k_ij d_k u); interior nodes only, zero
/// on the two-node rim that lacks stencils.
std::vector<Wedge2> tension_field(const ImmersionField3D& f, const MetricField3D& m);

double tension_max_norm(const ImmersionField3D& f);

struct G2StructureField {
  Grid3D grid;
  Variant variant;
  double tau;
  std::vector<double> dvol_h;               // sqrt|det h|
  std::vector<std::array<Wedge2, 3>> theta;  // theta_i = du/dw^i
  double max_dphi = 0.0;   // mixed-partial residual d_j theta_i - d_i theta_j
  double max_dpsi = 0.0;   // divergence-form residual of *3 dw^i ^ theta_i
  double fiber_volume_deviation = 0.0;  // psi fiber part vs tau dx^{1234}
};

G2StructureField assemble_g2_forms(const ImmersionField3D& f);

/// u(x, r) = r sigma(x) over a product grid of the surface with [r0, r1].
ImmersionField3D cone_extend(const dev::ImmersionSample& surface, double r0,
                             double r1, int nr, double tau, Variant variant);

struct ConeReport {
  double metric_deviation = 0.0;     // |h - (dr^2 + r^2 g_Sigma)|
  double max_tension = 0.0;
  double radial_scaling_deviation = 0.0;  // r^2 tau^gamma(r) constancy
};

ConeReport cone_check(const ImmersionField3D& cone,
                      const dev::ImmersionSample& surface);

struct MongeAmpereReport {
  double max_det_derivative = 0.0;   // max |d_a det Hess|
  double max_contraction = 0.0;      // max |psi^{ij} phi_{aij}|
  double max_ratio_deviation = 0.0;  // Jacobi identity, where the residuals live
  double min_hessian_eig = 0.0;
};

// potential samples on a 3-D grid; Hessian must be positive definite
MongeAmpereReport monge_ampere_check(const Grid3D& g,
                                     const std::vector<double>& potential);

}  // namespace atg::g2fib
