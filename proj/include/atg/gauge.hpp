#pragma once

#include <functional>
#include <string>

#include "atg/grid.hpp"
#include "atg/toda.hpp"

namespace atg::gauge {

using grid::Grid2D;
using grid::MatrixField2D;

/// Fixed structure data of a matrix representation: the anti-diagonal H used
/// by the split conjugation, the bilinear form S preserved by the connection,
/// and the Cartan sign pattern sigma (diagonal +-1).
struct Involutions {
  std::string rep_label;
  MatrixXcd H;      // split conjugation lambda_hat(A) = H conj(A) H^{-1}
  MatrixXcd S;      // invariant bilinear form <u, v> = u^T S v (E of the g2 rep)
  VectorXd sigma;   // sigma(e_i) = sigma_i e_i
  MatrixXcd rho_hat(const MatrixXcd& a) const { return -a.adjoint(); }
  MatrixXcd lambda_hat(const MatrixXcd& a) const {
    return H * a.conjugate() * H.inverse();
  }
  MatrixXcd sigma_apply(const MatrixXcd& a) const {
    MatrixXcd out = a;
    for (int i = 0; i < a.rows(); ++i)
      for (int j = 0; j < a.cols(); ++j) out(i, j) *= sigma[i] * sigma[j];
    return out;
  }
};

// families with explicit representations: tzitzeica/tzitzeica_elliptic (sl3),
// uniformizing/sinh_gordon (sl2), sp4_quartic, g2_sextic, d2_signed /
// d23_superconformal (even so-frame), b1_odd_definite (odd so-frame)
Involutions involutions_for(const toda::TodaSystem& sys);

// rejects sign patterns with no alternating structure (sigma = id)
void validate_sigma_pattern(const VectorXd& sigma);

/// dz / dzbar connection coefficients per node in the representation attached
/// to the solved system: A_z = -2 dOmega + Phi, A_zbar = Phi* (or the
/// frame-construction analogue for the so families).
struct ConnectionField {
  Grid2D grid;
  std::string rep_label;
  std::string family;
  MatrixField2D a_z, a_zbar;
  int boundary_margin = 0;  // nodes within the margin carry one-sided stencils
};

/// Per-node representation matrices of a solved system: Omega (diagonal),
/// Phi, Phi^* and the antilinear real-structure matrix Lambda of
/// lambda(v) = Lambda conj(v).
struct RepPointData {
  MatrixXcd omega, dz_omega, phi, phi_star, lambda_mat;
};

// deriv_order controls the finite-difference stencil on the solved fields
ConnectionField assemble_connection(const toda::TodaSystem& sys,
                                    const toda::ScalarField2D& omega,
                                    int deriv_order = 4);

RepPointData rep_point_data(const toda::TodaSystem& sys,
                            const toda::ScalarField2D& omega, int i, int j,
                            int deriv_order = 4);

struct CurvatureReport {
  grid::ScalarField2D norm_field;  // Frobenius norm per node
  double max_interior = 0.0;       // excludes nodes without centered stencils
};

// F = d_z A_zbar - d_zbar A_z + [A_z, A_zbar]
CurvatureReport curvature(const ConnectionField& conn, int deriv_order = 4);

struct RealFormReport {
  double lambda_reality = 0.0;   // max | dLambda + A Lambda - Lambda conj(A) |
  double sigma_phi = 0.0;        // max | sigma(Phi) + Phi |
  double involution_algebra = 0.0;  // max | rho_hat lambda_hat - sigma | on probes
};

RealFormReport verify_real_form(const toda::TodaSystem& sys,
                                const toda::ScalarField2D& omega,
                                const Involutions& inv, unsigned probe_seed = 1234);

// recovers the holomorphic differential from the invariant polynomial of Phi
// (Pfaffian for the even so families, top characteristic coefficient
// otherwise); returns max |inv(Phi) - scale * q^power| with the scale pinned
// algebraically from the system family.
double invariant_differential_deviation(const toda::TodaSystem& sys,
                                        const toda::ScalarField2D& omega);

}  // namespace atg::gauge
