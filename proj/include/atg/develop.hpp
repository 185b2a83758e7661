#pragma once

#include <utility>
#include <vector>

#include "atg/gauge.hpp"

namespace atg::dev {

using grid::Grid2D;
using NodeRef = std::pair<int, int>;

/// Frames along a grid path from RK4 integration of dF/dt = -F A(gamma').
struct FramePath {
  std::vector<NodeRef> nodes;
  std::vector<MatrixXcd> frames;
  double det_drift = 0.0;
  int substeps = 4;
};

FramePath parallel_transport(const gauge::ConnectionField& conn,
                             const std::vector<NodeRef>& path,
                             const MatrixXcd& start_frame, int substeps = 4);

// closed axis-aligned rectangle loop anchored at (i0,j0), returns ||F - I||
double loop_holonomy_defect(const gauge::ConnectionField& conn, int i0, int j0,
                            int side_i, int side_j, int substeps = 4);

/// Developed map values in R^{p,q} with the diagonalized form.
struct ImmersionSample {
  Grid2D grid;
  int ambient = 0;
  int sig_p = 0, sig_q = 0;
  double h0 = 1.0;
  std::vector<VectorXd> points;   // node-major real coordinates
  MatrixXd form;                  // diag(+-1)
  std::string section_label;
  double max_real_deviation = 0.0;   // imaginary residue of the developed section
  double max_quadric_deviation = 0.0;
  double max_conformal_deviation = 0.0;

  const VectorXd& at(int i, int j) const { return points[grid.node(i, j)]; }
  double pair(const VectorXd& a, const VectorXd& b) const {
    return a.dot(form * b);
  }
  cplx pairc(const VectorXcd& a, const VectorXcd& b) const {
    return a.transpose() * form.cast<cplx>() * b;
  }
};

struct DevelopResult {
  ImmersionSample immersion;
  std::vector<MatrixXcd> frames;    // developed frame per node (tree transport)
  MatrixXcd real_basis;             // columns span the lambda-fixed subspace
  double real_structure_drift = 0.0;
  double max_loop_defect = 0.0;     // flatness pre-check result
};

// develops the family's distinguished section over a spanning tree; the
// connection must pass the loop flatness pre-check at loop_tol.
DevelopResult develop_immersion(const toda::TodaSystem& sys,
                                const toda::ScalarField2D& omega,
                                double loop_tol = 1e-3, int substeps = 4);

/// Harmonic-sequence ladder phi_0..phi_{r+1} built by z-differentiation and
/// Hermitian projection on the developed immersion.
struct HarmonicSequence {
  int r = 0;
  bool superminimal = false;
  int first_degenerate_index = -1;            // -1 if none
  std::vector<std::vector<VectorXcd>> ladder;  // [step][node]
  std::vector<std::vector<double>> h_values;   // [step][node], h_0..h_r
  std::vector<cplx> q_recovered;               // <phi_{r+1}, phi_{r+1}> per node
  double max_orthogonality_defect = 0.0;
  int margin = 3;  // nodes that carry full interior stencils

  bool usable(const Grid2D& g, int i, int j) const { return g.interior(i, j, margin); }
};

HarmonicSequence harmonic_sequence(const ImmersionSample& imm, int r,
                                   int deriv_order = 4);

/// Affine-sphere structure check for developed sl3/Tzitzeica embeddings in
/// R^3: Blaschke metric, affine normal xi = (1/2) Laplace_h f and shape
/// operator from finite differences.
struct AffineSphereReport {
  double max_shape_deviation = 0.0;   // || S + I ||
  double max_normal_deviation = 0.0;  // || xi - f ||
  double min_metric_det = 0.0;
};

AffineSphereReport affine_sphere_check(const ImmersionSample& imm,
                                       int deriv_order = 4);

// pointwise almost-complex-curve residual s x grad_z s - i grad_z s through
// the split-octonion cross product (g2_sextic systems)
double almost_complex_residual(const toda::TodaSystem& sys,
                               const toda::ScalarField2D& omega);

// developed-field variant using finite differences of the immersion
double almost_complex_residual_developed(const DevelopResult& dev,
                                         int deriv_order = 4);

// discrete tension of the developed map into the quadric:
// phi_zzbar - lambda phi with lambda = -<phi_z, phi_zbar>/h0
double quadric_tension_residual(const ImmersionSample& imm, int deriv_order = 4);

/// Convex-foliated projective structure identity a a_1 + a_2 = 0 at a point
/// of the upper half-plane and a tangent angle.
struct ConvexFoliatedReport {
  double a = 0.0, a1 = 0.0, a2 = 0.0;
  double deviation = 0.0;  // |a a1 + a2| / scale
};

ConvexFoliatedReport verify_convex_foliated(cplx z, double theta);

// transports the uniformizing covariant-constant section and compares with
// the closed form s_1 = conj(s_2)/(sqrt(2) y); returns the max deviation
double uniformizing_section_deviation(const toda::TodaSystem& sys,
                                      const toda::ScalarField2D& omega,
                                      double a, double b, int substeps = 8);

}  // namespace atg::dev
