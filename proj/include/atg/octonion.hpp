#pragma once

#include <array>
#include <cstdint>

#include <boost/rational.hpp>

#include "atg/common.hpp"

namespace atg::octo {

using Rat = boost::rational<long long>;

/// Split octonion with exact rational coordinates against the ordered basis
/// (1, i, j, k, l, li, lj, lk).
struct SplitOctonion {
  std::array<Rat, 8> c{};

  static SplitOctonion basis(int k) {
    SplitOctonion x;
    x.c[k] = 1;
    return x;
  }
  bool imaginary() const { return c[0] == Rat(0); }
  SplitOctonion conj() const {
    SplitOctonion y;
    y.c[0] = c[0];
    for (int k = 1; k < 8; ++k) y.c[k] = -c[k];
    return y;
  }
  friend SplitOctonion operator+(SplitOctonion a, const SplitOctonion& b) {
    for (int k = 0; k < 8; ++k) a.c[k] += b.c[k];
    return a;
  }
  friend SplitOctonion operator-(SplitOctonion a, const SplitOctonion& b) {
    for (int k = 0; k < 8; ++k) a.c[k] -= b.c[k];
    return a;
  }
  friend SplitOctonion operator*(const Rat& s, SplitOctonion a) {
    for (int k = 0; k < 8; ++k) a.c[k] *= s;
    return a;
  }
  bool operator==(const SplitOctonion&) const = default;
};

// sign/index of basis products: basis(a) * basis(b) = sign * basis(index)
struct TableEntry {
  int sign;
  int index;
};
TableEntry multiplication_table(int a, int b);

SplitOctonion multiply(const SplitOctonion& x, const SplitOctonion& y);

// N(x) = x conj(x), real part (the split quadratic form)
Rat norm(const SplitOctonion& x);

// g(x, y) = Re(x conj(y)); equals -1/2(xy + yx) on imaginaries
Rat metric(const SplitOctonion& x, const SplitOctonion& y);

// x cross y = 1/2 (xy - yx); requires imaginary inputs
SplitOctonion cross(const SplitOctonion& x, const SplitOctonion& y);

// phi(a, b, c) = <a cross b, c> on imaginaries
Rat phi_eval(const SplitOctonion& a, const SplitOctonion& b, const SplitOctonion& c);

/// The associative 3-form, coassociative 4-form and the (3,4) metric on
/// Im(O~) in coordinates x^1..x^7 = (i, j, k, l, li, lj, lk).
struct G2Forms {
  double phi3[7][7][7] = {};
  double psi4[7][7][7][7] = {};
  MatrixXd metric_g;  // diag(1,1,1,-1,-1,-1,-1)
};
G2Forms g2_forms();

// complex-linear isomorphism from the 7-dim g2 module basis e_3..e_{-3}
// (columns, descending) onto complexified imaginary split octonions
MatrixXcd g2_basis_map();

// cross product extended complex-bilinearly to C^7 in the imaginary basis
VectorXcd cross_complex(const VectorXcd& x, const VectorXcd& y);

// dimension of the stabilizer of phi3 inside gl(7, R) (equals 14) and inside
// the phi3-metric's so(3,4) (also 14), via the linear derivation system
int phi3_stabilizer_dimension(bool restrict_so34);

// the 14 parameter matrices of the parabolic-basis presentation, conjugated
// into the imaginary-octonion basis
std::vector<MatrixXd> g2_parabolic_basis_matrices();

// max |X . phi3| of the induced derivation action over the given matrices
double derivation_action_residual(const std::vector<MatrixXd>& mats);

}  // namespace atg::octo
