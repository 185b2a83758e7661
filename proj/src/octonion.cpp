#include "atg/octonion.hpp"

#include <cmath>

#include <Eigen/SVD>

namespace atg::octo {

namespace {

// products of (1,i,j,k,l,li,lj,lk); entry (row a, col b) = a*b
// encoded as signed 1-based basis index
constexpr int kTable[8][8] = {
    {+1, +2, +3, +4, +5, +6, +7, +8},
    {+2, -1, +4, -3, -6, +5, -8, +7},
    {+3, -4, -1, +2, -7, +8, +5, -6},
    {+4, +3, -2, -1, -8, -7, +6, +5},
    {+5, +6, +7, +8, +1, +2, +3, +4},
    {+6, -5, -8, +7, -2, +1, +4, -3},
    {+7, +8, -5, -6, -3, -4, +1, +2},
    {+8, -7, +6, -5, -4, +3, -2, +1},
};

}  // namespace

TableEntry multiplication_table(int a, int b) {
  const int v = kTable[a][b];
  return {v > 0 ? 1 : -1, std::abs(v) - 1};
}

SplitOctonion multiply(const SplitOctonion& x, const SplitOctonion& y) {
  SplitOctonion z;
  for (int a = 0; a < 8; ++a) {
    if (x.c[a] == Rat(0)) continue;
    for (int b = 0; b < 8; ++b) {
      if (y.c[b] == Rat(0)) continue;
      const TableEntry t = multiplication_table(a, b);
      z.c[t.index] += Rat(t.sign) * x.c[a] * y.c[b];
    }
  }
  return z;
}

Rat norm(const SplitOctonion& x) { return multiply(x, x.conj()).c[0]; }

Rat metric(const SplitOctonion& x, const SplitOctonion& y) {
  return multiply(x, y.conj()).c[0];
}

SplitOctonion cross(const SplitOctonion& x, const SplitOctonion& y) {
  if (!x.imaginary() || !y.imaginary())
    throw ConfigError("cross product requires imaginary octonions");
  return Rat(1, 2) * (multiply(x, y) - multiply(y, x));
}

Rat phi_eval(const SplitOctonion& a, const SplitOctonion& b, const SplitOctonion& c) {
  if (!c.imaginary()) throw ConfigError("phi takes imaginary arguments");
  return metric(cross(a, b), c);
}

G2Forms g2_forms() {
  G2Forms f;
  f.metric_g = MatrixXd::Zero(7, 7);
  for (int a = 0; a < 7; ++a) f.metric_g(a, a) = a < 3 ? 1.0 : -1.0;
  for (int a = 0; a < 7; ++a)
    for (int b = 0; b < 7; ++b)
      for (int c = 0; c < 7; ++c)
        f.phi3[a][b][c] = boost::rational_cast<double>(
            phi_eval(SplitOctonion::basis(a + 1), SplitOctonion::basis(b + 1),
                     SplitOctonion::basis(c + 1)));
  // psi = *phi w.r.t. the (3,4) metric: psi_{abcd} = (1/3!) eps_{abcdefg} phi^{efg}
  int perm[7];
  for (int a = 0; a < 7; ++a) perm[a] = a;
  // iterate over all permutations of 7 indices to build the epsilon contraction
  auto sgn_of = [](int* p) {
    int s = 1;
    int q[7];
    for (int t = 0; t < 7; ++t) q[t] = p[t];
    for (int t = 0; t < 7; ++t)
      for (int u = t + 1; u < 7; ++u)
        if (q[t] > q[u]) {
          std::swap(q[t], q[u]);
          s = -s;
        }
    return s;
  };
  std::sort(perm, perm + 7);
  do {
    const int a = perm[0], b = perm[1], c = perm[2], d = perm[3];
    const int e = perm[4], ff = perm[5], g = perm[6];
    const double up = f.phi3[e][ff][g] * f.metric_g(e, e) * f.metric_g(ff, ff) *
                      f.metric_g(g, g);
    f.psi4[a][b][c][d] += sgn_of(perm) * up / 6.0;
  } while (std::next_permutation(perm, perm + 7));
  return f;
}

MatrixXcd g2_basis_map() {
  MatrixXcd b = MatrixXcd::Zero(7, 7);
  const double s = 1.0 / std::sqrt(2.0);
  auto set_pair = [&](int col_plus, int col_minus, int i1, cplx v1, int i2, cplx v2) {
    b(i1, col_plus) = v1 * s;
    b(i2, col_plus) = v2 * s;
    b(i1, col_minus) = std::conj(v1) * s;
    b(i2, col_minus) = std::conj(v2) * s;
  };
  // columns 0..6 = e_3, e_2, e_1, e_0, e_-1, e_-2, e_-3
  // e_3 = (jl + sqrt(-1) kl)/sqrt(2); jl = -lj, kl = -lk in the table
  set_pair(0, 6, 5, -1.0, 6, -I);
  set_pair(1, 5, 1, 1.0, 2, I);   // e_2 = (j + i k)/sqrt(2)
  set_pair(2, 4, 3, 1.0, 4, -I);  // e_1 = (l + sqrt(-1) il)/sqrt(2), il = -li
  b(0, 3) = 1.0;                  // e_0 = i
  return b;
}

VectorXcd cross_complex(const VectorXcd& x, const VectorXcd& y) {
  static const G2Forms f = g2_forms();
  VectorXcd out = VectorXcd::Zero(7);
  for (int a = 0; a < 7; ++a)
    for (int b = 0; b < 7; ++b) {
      if (x[a] == cplx(0.0) || y[b] == cplx(0.0)) continue;
      for (int c = 0; c < 7; ++c)
        if (f.phi3[a][b][c] != 0.0)
          out[c] += x[a] * y[b] * f.phi3[a][b][c] * f.metric_g(c, c);
    }
  return out;
}

namespace {

MatrixXd derivation_system(bool restrict_so34) {
  const G2Forms f = g2_forms();
  // unknowns X(7x7) column-major; rows: triples a<b<c (+ so(3,4) constraints)
  const int ntrip = 35;
  const int extra = restrict_so34 ? 28 : 0;
  MatrixXd sys = MatrixXd::Zero(ntrip + extra, 49);
  int row = 0;
  for (int a = 0; a < 7; ++a)
    for (int b = a + 1; b < 7; ++b)
      for (int c = b + 1; c < 7; ++c) {
        for (int m = 0; m < 7; ++m) {
          sys(row, m * 7 + a) += f.phi3[m][b][c];  // X_{ma} phi(e_m, e_b, e_c)
          sys(row, m * 7 + b) += f.phi3[a][m][c];
          sys(row, m * 7 + c) += f.phi3[a][b][m];
        }
        ++row;
      }
  if (restrict_so34) {
    for (int a = 0; a < 7; ++a)
      for (int b = a; b < 7; ++b) {
        // g(Xa, b) + g(a, Xb) = 0
        for (int m = 0; m < 7; ++m) {
          sys(row, m * 7 + a) += f.metric_g(m, b);
          sys(row, m * 7 + b) += f.metric_g(a, m);
        }
        ++row;
      }
  }
  return sys;
}

}  // namespace

int phi3_stabilizer_dimension(bool restrict_so34) {
  const MatrixXd sys = derivation_system(restrict_so34);
  Eigen::JacobiSVD<MatrixXd> svd(sys);
  const auto& sv = svd.singularValues();
  int rank = 0;
  for (int k = 0; k < sv.size(); ++k)
    if (sv[k] > 1e-9 * sv[0]) ++rank;
  return 49 - rank;
}

std::vector<MatrixXd> g2_parabolic_basis_matrices() {
  const double r2 = std::sqrt(2.0);
  // parameter order: u1 u2 u3 u4 l1..l5 v1..v5
  auto param_matrix = [&](const VectorXd& p) {
    const double u1 = p[0], u2 = p[1], u3 = p[2], u4 = p[3];
    const double l1 = p[4], l2 = p[5], l3 = p[6], l4 = p[7], l5 = p[8];
    const double v1 = p[9], v2 = p[10], v3 = p[11], v4 = p[12], v5 = p[13];
    MatrixXd m(7, 7);
    m << u1 + u4, l1, l2, l3, l4, l5, 0,
        v1, u1, u2, r2 * l2, l3 / r2, 0, l5,
        v2, u3, u4, -r2 * l1, 0, l3 / r2, -l4,
        v3, r2 * v2, -r2 * v1, 0, -r2 * l1, -r2 * l2, l3,
        v4, v3 / r2, 0, -r2 * v1, -u4, u2, -l2,
        v5, 0, v3 / r2, -r2 * v2, u3, -u1, l1,
        0, v5, -v4, v3, -v2, v1, -u1 - u4;
    return m;
  };
  // change of basis: parabolic ordered basis expressed in (i,j,k,l,li,lj,lk)
  MatrixXd pb = MatrixXd::Zero(7, 7);
  const double s = 1.0 / r2;
  pb(0, 0) = s; pb(4, 0) = s;    // (i + li)/sqrt2
  pb(1, 1) = -s; pb(5, 1) = s;   // (lj - j)/sqrt2
  pb(2, 2) = s; pb(6, 2) = -s;   // (k - lk)/sqrt2
  pb(3, 3) = 1.0;                // l
  pb(2, 4) = s; pb(6, 4) = s;    // (k + lk)/sqrt2
  pb(1, 5) = s; pb(5, 5) = s;    // (j + lj)/sqrt2
  pb(0, 6) = s; pb(4, 6) = -s;   // (i - li)/sqrt2
  const MatrixXd pbi = pb.inverse();
  std::vector<MatrixXd> out;
  for (int k = 0; k < 14; ++k) {
    VectorXd p = VectorXd::Zero(14);
    p[k] = 1.0;
    out.push_back(pb * param_matrix(p) * pbi);
  }
  return out;
}

double derivation_action_residual(const std::vector<MatrixXd>& mats) {
  const G2Forms f = g2_forms();
  double worst = 0.0;
  for (const MatrixXd& x : mats)
    for (int a = 0; a < 7; ++a)
      for (int b = a + 1; b < 7; ++b)
        for (int c = b + 1; c < 7; ++c) {
          double acc = 0.0;
          for (int m = 0; m < 7; ++m)
            acc += x(m, a) * f.phi3[m][b][c] + x(m, b) * f.phi3[a][m][c] +
                   x(m, c) * f.phi3[a][b][m];
          worst = std::max(worst, std::abs(acc));
        }
  return worst;
}

}  // namespace atg::octo
