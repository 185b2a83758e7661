#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "atg/common.hpp"

namespace atg::lie {

/// Generalised Cartan matrix of affine type with its marks and comarks.
/// Index 0 is the affine node; cartan(j, i) = alpha_i(h_j).
struct AffineDiagram {
  std::string label;
  Eigen::MatrixXi cartan;
  Eigen::VectorXi marks;    // a_0..a_l, positive, gcd 1, cartan * marks = 0
  Eigen::VectorXi comarks;  // c_0..c_l, positive, gcd 1, comarks^T * cartan = 0
  int rank() const { return static_cast<int>(cartan.rows()) - 1; }
};

// Supported labels: A_l(1) l>=1, B_n(1) n>=2, C_n(1) n>=2, D_n(1) n>=4,
// E_6(1), E_7(1), E_8(1), F_4(1), G_2(1), A_2n(2) n>=1, D_n+1(2) n>=2
// (spelled e.g. "A_2(1)", "A_4(2)", "D_3(2)", "B_4(1)").
AffineDiagram build_affine_diagram(const std::string& label);

// Affine diagram governing the reduced Toda equations after projecting the
// root system to the nu-fixed subspace.  Total on
// {A_n, B_n, C_n, D_n, E_6, E_7, E_8, F_4, G_2} (pass e.g. "A_4", "E_6").
std::string fold_restricted_roots(const std::string& simple_type);

// Exponents of the simple type, sorted ascending.
std::vector<int> exponents(const std::string& simple_type);

/// Realized root vectors h_i and covectors alpha_i in an l-dimensional
/// Euclidean space, normalized so long roots have squared length 2.
struct RootDatum {
  AffineDiagram diagram;
  int dim;                            // l
  std::vector<VectorXd> basis_h;      // h_0..h_l
  std::vector<VectorXd> duals_alpha;  // alpha_0..alpha_l
  MatrixXd inner;                     // ambient Gram matrix (identity)

  double pairing(int i, int j) const {  // alpha_i(h_j)
    return duals_alpha[i].dot(inner * basis_h[j]);
  }
};

RootDatum realize_root_datum(const AffineDiagram& diagram);

/// Principal sl2 triple (x, e, e_tilde) in an explicit matrix representation
/// together with the highest-weight element e_top it exposes to cyclic Higgs
/// fields.
struct PrincipalSL2 {
  std::string label;
  int rep_dim = 0;
  MatrixXcd x, e, e_tilde;
  MatrixXcd e_top;               // [x, e_top] = M e_top
  int exponent_max = 0;          // M
  std::vector<double> r_coeffs;  // e = sum sqrt(r_a) E_a along the chain
  bool cyclic_capable = true;    // false for the even so(p,q) frame
};

// rep_label in {sl2_fund, sl3_fund, sp4_fund, g2_7dim,
//               so_pq_harmonic(r,odd), so_pq_harmonic(r,even)}.
PrincipalSL2 principal_sl2(const std::string& rep_label);

struct CyclicHiggsField {
  PrincipalSL2 rep;
  cplx q_coeff;
  MatrixXcd matrix;  // e_tilde + q e_top
};

CyclicHiggsField cyclic_higgs_field(const PrincipalSL2& rep, cplx q);

// g = exp(2 pi i x / (M+1)); Ad_g Phi = exp(2 pi i M/(M+1)) Phi on cyclic fields.
MatrixXcd cyclic_symmetry(const PrincipalSL2& rep);

}  // namespace atg::lie
