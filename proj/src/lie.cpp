#include "atg/lie.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <regex>

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/MatrixFunctions>

namespace atg::lie {

namespace {

struct Edge {
  int i, j;
  int aij, aji;  // cartan(i,j), cartan(j,i)
};

Eigen::MatrixXi cartan_from_edges(int n, const std::vector<Edge>& edges) {
  Eigen::MatrixXi a = Eigen::MatrixXi::Zero(n, n);
  for (int k = 0; k < n; ++k) a(k, k) = 2;
  for (const auto& e : edges) {
    a(e.i, e.j) = e.aij;
    a(e.j, e.i) = e.aji;
  }
  return a;
}

// Positive integer null vector of an affine GCM (corank 1), gcd 1.
Eigen::VectorXi integer_null_vector(const Eigen::MatrixXi& a) {
  const int n = static_cast<int>(a.rows());
  Eigen::MatrixXd ad = a.cast<double>();
  Eigen::JacobiSVD<MatrixXd> svd(ad, Eigen::ComputeFullV);
  VectorXd v = svd.matrixV().col(n - 1);
  if (v.sum() < 0) v = -v;
  double vmin = v.cwiseAbs().minCoeff();
  if (vmin < 1e-12) throw NumericError("degenerate null vector for " + std::to_string(n));
  v /= vmin;
  for (int scale = 1; scale <= 360; ++scale) {
    VectorXd w = v * scale;
    Eigen::VectorXi wi(n);
    bool ok = true;
    for (int k = 0; k < n; ++k) {
      wi[k] = static_cast<int>(std::llround(w[k]));
      if (std::abs(w[k] - wi[k]) > 1e-6 || wi[k] <= 0) { ok = false; break; }
    }
    if (!ok) continue;
    int g = 0;
    for (int k = 0; k < n; ++k) g = std::gcd(g, wi[k]);
    wi /= g;
    if ((a * wi).isZero()) return wi;
  }
  throw NumericError("failed to rationalize null vector");
}

std::vector<Edge> chain(int from, int to) {  // simply laced path from..to
  std::vector<Edge> e;
  for (int k = from; k < to; ++k) e.push_back({k, k + 1, -1, -1});
  return e;
}

}  // namespace

AffineDiagram build_affine_diagram(const std::string& label) {
  static const std::regex pat(R"(([A-G])_(\d+)\((\d)\))");
  std::smatch m;
  if (!std::regex_match(label, m, pat))
    throw ConfigError("unsupported diagram label: " + label);
  const std::string family = m[1];
  const int sub = std::stoi(m[2]);
  const int twist = std::stoi(m[3]);

  std::vector<Edge> edges;
  int n = 0;  // node count = l+1

  if (twist == 1) {
    if (family == "A" && sub == 1) {
      n = 2;
      edges = {{0, 1, -2, -2}};
    } else if (family == "A" && sub >= 2) {
      n = sub + 1;
      edges = chain(0, n - 1);
      edges.push_back({n - 1, 0, -1, -1});
    } else if (family == "B" && sub == 2) {
      n = 3;  // two long ends against a short middle
      edges = {{0, 2, -1, -2}, {1, 2, -1, -2}};
    } else if (family == "B" && sub >= 3) {
      n = sub + 1;
      edges = chain(1, sub - 1);
      edges.push_back({sub - 1, sub, -1, -2});  // alpha_sub short
      edges.push_back({0, 2, -1, -1});
    } else if (family == "C" && sub >= 2) {
      n = sub + 1;
      edges = chain(1, sub - 1);
      edges.push_back({sub - 1, sub, -2, -1});  // alpha_sub long
      edges.push_back({0, 1, -1, -2});          // alpha_0 long
    } else if (family == "D" && sub >= 4) {
      n = sub + 1;
      edges = chain(1, sub - 2);
      edges.push_back({sub - 2, sub - 1, -1, -1});
      edges.push_back({sub - 2, sub, -1, -1});
      edges.push_back({0, 2, -1, -1});
    } else if (family == "E" && sub == 6) {
      n = 7;
      edges = chain(3, 6);
      edges.insert(edges.end(), {{1, 3, -1, -1}, {2, 4, -1, -1}, {0, 2, -1, -1}});
    } else if (family == "E" && sub == 7) {
      n = 8;
      edges = chain(3, 7);
      edges.insert(edges.end(), {{1, 3, -1, -1}, {2, 4, -1, -1}, {0, 1, -1, -1}});
    } else if (family == "E" && sub == 8) {
      n = 9;
      edges = chain(3, 8);
      edges.insert(edges.end(), {{1, 3, -1, -1}, {2, 4, -1, -1}, {0, 8, -1, -1}});
    } else if (family == "F" && sub == 4) {
      n = 5;
      edges = {{0, 1, -1, -1}, {1, 2, -1, -1}, {2, 3, -1, -2}, {3, 4, -1, -1}};
    } else if (family == "G" && sub == 2) {
      n = 3;
      edges = {{0, 1, -1, -1}, {1, 2, -1, -3}};
    } else {
      throw ConfigError("unsupported diagram label: " + label);
    }
  } else if (twist == 2) {
    if (family == "A" && sub >= 2 && sub % 2 == 0) {
      const int l = sub / 2;
      n = l + 1;
      if (l == 1) {
        edges = {{0, 1, -1, -4}};
      } else {
        edges = chain(1, l - 1);
        edges.push_back({0, 1, -1, -2});
        edges.push_back({l - 1, l, -1, -2});
      }
    } else if (family == "D" && sub >= 3) {
      const int l = sub - 1;  // D_{l+1}(2), l = r nodes beside the affine one
      n = l + 1;
      edges = chain(2, l);
      edges.push_back({2, 1, -1, -2});  // alpha_1 short
      edges.push_back({l, 0, -1, -2});  // alpha_0 short
      if (l == 1) edges = {{0, 1, -2, -2}};  // degenerate D_2(2) = A_1(1)
    } else {
      throw ConfigError("unsupported diagram label: " + label);
    }
  } else {
    throw ConfigError("unsupported diagram label: " + label);
  }

  AffineDiagram d;
  d.label = label;
  d.cartan = cartan_from_edges(n, edges);
  d.marks = integer_null_vector(d.cartan);
  d.comarks = integer_null_vector(d.cartan.transpose());
  return d;
}

std::string fold_restricted_roots(const std::string& simple_type) {
  static const std::regex pat(R"(([A-G])_(\d+))");
  std::smatch m;
  if (!std::regex_match(simple_type, m, pat))
    throw ConfigError("unsupported simple type: " + simple_type);
  const std::string fam = m[1];
  const int k = std::stoi(m[2]);
  auto untwisted = [&]() { return fam + "_" + std::to_string(k) + "(1)"; };

  if (fam == "A") {
    if (k == 1) return "A_1(1)";
    if (k % 2 == 0) return "A_" + std::to_string(k) + "(2)";        // A_2n -> A_2n(2)
    return "C_" + std::to_string((k + 1) / 2) + "(1)";              // A_2n-1 -> C_n(1)
  }
  if (fam == "D") {
    if (k % 2 == 1) return "B_" + std::to_string(k - 1) + "(1)";    // D_2n+1 -> B_2n(1)
    return untwisted();
  }
  if (fam == "E" && k == 6) return "F_4(1)";
  if (fam == "B" || fam == "C" || (fam == "E" && (k == 7 || k == 8)) ||
      (fam == "F" && k == 4) || (fam == "G" && k == 2))
    return untwisted();
  throw ConfigError("unsupported simple type: " + simple_type);
}

std::vector<int> exponents(const std::string& simple_type) {
  static const std::regex pat(R"(([A-G])_(\d+))");
  std::smatch m;
  if (!std::regex_match(simple_type, m, pat))
    throw ConfigError("unsupported simple type: " + simple_type);
  const std::string fam = m[1];
  const int k = std::stoi(m[2]);
  std::vector<int> ex;
  if (fam == "A") {
    for (int i = 1; i <= k; ++i) ex.push_back(i);
  } else if (fam == "B" || fam == "C") {
    for (int i = 1; i <= k; ++i) ex.push_back(2 * i - 1);
  } else if (fam == "D" && k >= 3) {
    for (int i = 1; i < k; ++i) ex.push_back(2 * i - 1);
    ex.push_back(k - 1);
  } else if (fam == "E" && k == 6) {
    ex = {1, 4, 5, 7, 8, 11};
  } else if (fam == "E" && k == 7) {
    ex = {1, 5, 7, 9, 11, 13, 17};
  } else if (fam == "E" && k == 8) {
    ex = {1, 7, 11, 13, 17, 19, 23, 29};
  } else if (fam == "F" && k == 4) {
    ex = {1, 5, 7, 11};
  } else if (fam == "G" && k == 2) {
    ex = {1, 5};
  } else {
    throw ConfigError("unsupported simple type: " + simple_type);
  }
  std::sort(ex.begin(), ex.end());
  return ex;
}

RootDatum realize_root_datum(const AffineDiagram& diagram) {
  const int l = diagram.rank();
  if (l < 1) throw ConfigError("diagram rank must be >= 1");
  const Eigen::MatrixXi& a = diagram.cartan;

  // Symmetrizer over the finite part (nodes 1..l): d_i a(i,j) = d_j a(j,i).
  VectorXd d = VectorXd::Zero(l + 1);
  d[1] = 1.0;
  bool grew = true;
  while (grew) {
    grew = false;
    for (int i = 1; i <= l; ++i)
      for (int j = 1; j <= l; ++j)
        if (i != j && a(i, j) != 0 && d[i] > 0 && d[j] == 0) {
          d[j] = d[i] * a(i, j) / a(j, i);
          grew = true;
        }
  }
  for (int i = 1; i <= l; ++i)
    if (d[i] <= 0) throw NumericError("finite part of " + diagram.label + " not connected");
  d /= d.segment(1, l).maxCoeff();  // long roots: squared length 2

  MatrixXd gram(l, l);
  for (int i = 1; i <= l; ++i)
    for (int j = 1; j <= l; ++j) gram(i - 1, j - 1) = d[i] * a(i, j);
  Eigen::LLT<MatrixXd> llt(gram);
  if (llt.info() != Eigen::Success)
    throw NumericError("finite Gram matrix of " + diagram.label + " not positive definite");
  MatrixXd lmat = llt.matrixL();

  RootDatum r;
  r.diagram = diagram;
  r.dim = l;
  r.inner = MatrixXd::Identity(l, l);
  r.duals_alpha.assign(l + 1, VectorXd::Zero(l));
  r.basis_h.assign(l + 1, VectorXd::Zero(l));
  for (int i = 1; i <= l; ++i) {
    r.duals_alpha[i] = lmat.row(i - 1).transpose();
    r.basis_h[i] = r.duals_alpha[i] / d[i];
  }
  // Affine node from the null identities sum a_i alpha_i = 0, sum c_i h_i = 0.
  for (int i = 1; i <= l; ++i) {
    r.duals_alpha[0] -= double(diagram.marks[i]) / diagram.marks[0] * r.duals_alpha[i];
    r.basis_h[0] -= double(diagram.comarks[i]) / diagram.comarks[0] * r.basis_h[i];
  }
  for (int i = 0; i <= l; ++i)
    for (int j = 0; j <= l; ++j)
      if (std::abs(r.pairing(i, j) - a(j, i)) > 1e-9)
        throw NumericError("root realization inconsistent for " + diagram.label);
  return r;
}

namespace {

// sl2 chain in dimension n for half-integer top weight: x = diag(w, w-1, ...),
// e on the superdiagonal with entries fixed by [e, e~] = x.
PrincipalSL2 sl2_chain(const std::string& label, const VectorXd& weights) {
  const int n = static_cast<int>(weights.size());
  PrincipalSL2 p;
  p.label = label;
  p.rep_dim = n;
  p.x = MatrixXcd::Zero(n, n);
  for (int i = 0; i < n; ++i) p.x(i, i) = weights[i];
  p.e = MatrixXcd::Zero(n, n);
  p.e_tilde = MatrixXcd::Zero(n, n);
  double partial = 0.0;
  for (int i = 0; i + 1 < n; ++i) {
    partial += weights[i];
    if (partial <= 0) throw NumericError("non-chain weights in sl2_chain");
    const double c = std::sqrt(partial);
    p.e(i, i + 1) = c;
    p.e_tilde(i + 1, i) = c;
    p.r_coeffs.push_back(partial);
  }
  return p;
}

int parse_so_harmonic(const std::string& label, bool& odd) {
  static const std::regex pat(R"(so_pq_harmonic\((\d+),\s*(odd|even)\))");
  std::smatch m;
  if (!std::regex_match(label, m, pat)) return -1;
  odd = (m[2] == "odd");
  return std::stoi(m[1]);
}

}  // namespace

PrincipalSL2 principal_sl2(const std::string& rep_label) {
  if (rep_label == "sl2_fund") {
    VectorXd w(2);
    w << 0.5, -0.5;
    auto p = sl2_chain(rep_label, w);  // e Y = X/sqrt(2)
    p.exponent_max = 1;
    p.e_top = p.e;
    return p;
  }
  if (rep_label == "sl3_fund") {
    VectorXd w(3);
    w << 1, 0, -1;
    auto p = sl2_chain(rep_label, w);
    p.exponent_max = 2;
    p.e_top = MatrixXcd::Zero(3, 3);
    p.e_top(0, 2) = 1.0;
    return p;
  }
  if (rep_label == "sp4_fund") {
    VectorXd w(4);
    w << 1.5, 0.5, -0.5, -1.5;
    auto p = sl2_chain(rep_label, w);  // superdiagonal sqrt(3/2), sqrt(2), sqrt(3/2)
    p.exponent_max = 3;
    p.e_top = MatrixXcd::Zero(4, 4);
    p.e_top(0, 3) = 1.0;
    return p;
  }
  if (rep_label == "g2_7dim") {
    const int n = 7;
    PrincipalSL2 p;
    p.label = rep_label;
    p.rep_dim = n;
    p.x = MatrixXcd::Zero(n, n);
    for (int i = 0; i < n; ++i) p.x(i, i) = 3.0 - i;
    p.e = MatrixXcd::Zero(n, n);
    const cplx entries[6] = {std::sqrt(3.0), std::sqrt(5.0), I * std::sqrt(6.0),
                             I * std::sqrt(6.0), std::sqrt(5.0), std::sqrt(3.0)};
    for (int i = 0; i < 6; ++i) p.e(i, i + 1) = entries[i];
    p.e_tilde = p.e.adjoint();  // -rho_hat(e)
    p.r_coeffs = {3, 5, 6, 6, 5, 3};
    p.exponent_max = 5;
    p.e_top = MatrixXcd::Zero(n, n);
    p.e_top(0, 5) = 1.0;
    p.e_top(1, 6) = 1.0;
    return p;
  }
  bool odd = false;
  const int r = parse_so_harmonic(rep_label, odd);
  if (r >= 1) {
    if (odd) {
      // frame e_{r+1}, e_r, ..., e_{-r-1}: regular chain, weights r+1..-(r+1)
      const int n = 2 * r + 3;
      VectorXd w(n);
      for (int i = 0; i < n; ++i) w[i] = r + 1 - i;
      auto p = sl2_chain(rep_label, w);
      p.exponent_max = 2 * r + 1;
      p.e_top = MatrixXcd::Zero(n, n);
      p.e_top(0, n - 2) = 1.0;
      p.e_top(1, n - 1) = 1.0;
      return p;
    }
    // even frame: chain e_r..e_{-r} plus the isolated weight-0 line e_{r+1}
    const int n = 2 * r + 2;
    PrincipalSL2 p;
    p.label = rep_label;
    p.rep_dim = n;
    p.x = MatrixXcd::Zero(n, n);
    p.e = MatrixXcd::Zero(n, n);
    p.e_tilde = MatrixXcd::Zero(n, n);
    double partial = 0.0;
    for (int i = 0; i < 2 * r + 1; ++i) {
      p.x(i, i) = r - i;
      if (i < 2 * r) {
        partial += r - i;
        const double c = std::sqrt(partial);
        p.e(i, i + 1) = c;
        p.e_tilde(i + 1, i) = c;
        p.r_coeffs.push_back(partial);
      }
    }
    p.x(n - 1, n - 1) = 0.0;
    p.exponent_max = r;
    p.cyclic_capable = false;  // the Pfaffian, not the top invariant, carries q
    p.e_top = MatrixXcd::Zero(n, n);
    return p;
  }
  throw ConfigError("unsupported representation label: " + rep_label);
}

CyclicHiggsField cyclic_higgs_field(const PrincipalSL2& rep, cplx q) {
  if (!rep.cyclic_capable)
    throw ConfigError("representation " + rep.label + " carries no cyclic Higgs field");
  CyclicHiggsField f;
  f.rep = rep;
  f.q_coeff = q;
  f.matrix = rep.e_tilde + q * rep.e_top;
  return f;
}

MatrixXcd cyclic_symmetry(const PrincipalSL2& rep) {
  const cplx factor = 2.0 * M_PI * I / double(rep.exponent_max + 1);
  MatrixXcd g = MatrixXcd::Zero(rep.rep_dim, rep.rep_dim);
  for (int i = 0; i < rep.rep_dim; ++i) g(i, i) = std::exp(factor * rep.x(i, i));
  return g;
}

}  // namespace atg::lie
