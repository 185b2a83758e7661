#include "atg/toda.hpp"

#include <cmath>
#include <random>

#include <Eigen/SparseLU>

namespace atg::toda {

namespace {

constexpr double kExpClamp = 50.0;

VectorXcd unit(int n, int c, cplx v = 1.0) {
  VectorXcd u = VectorXcd::Zero(n);
  u[c] = v;
  return u;
}

void chain_terms(TodaSystem& sys, int r, const std::vector<int>& nu) {
  // 2(w_i)_zzbar = nu_{i+1} e^{2(w_{i+1}-w_i)} - nu_i e^{2(w_i-w_{i-1})}, w_0 = 0
  const int n = sys.channels;
  for (int j = 1; j <= r; ++j) {
    ExpTerm t;
    t.k = double(nu[j - 1]);
    t.expo = VectorXcd::Zero(n);
    t.expo[j - 1] = 2.0;
    if (j >= 2) t.expo[j - 2] = -2.0;
    t.dir = VectorXcd::Zero(n);
    t.dir[j - 1] = -1.0;
    if (j >= 2) t.dir[j - 2] = 1.0;
    sys.terms.push_back(t);
  }
}

cplx qfactor(const TodaSystem& sys, int node, QFactor qf) {
  if (qf == QFactor::None) return 1.0;
  const cplx qv = sys.q.samples.values[node];
  switch (qf) {
    case QFactor::Q: return qv;
    case QFactor::QBar: return std::conj(qv);
    default: return qv * std::conj(qv);
  }
}

}  // namespace

TodaSystem make_system(const std::string& family, const Grid2D& g,
                       const HoloDifferential& q, const std::vector<int>& signs,
                       int r) {
  TodaSystem sys;
  sys.family = family;
  sys.grid = g;
  sys.q = q;
  sys.signs = signs;
  const auto one = [&](cplx k, QFactor qf, cplx expo, cplx dir) {
    ExpTerm t;
    t.k = k;
    t.qf = qf;
    t.expo = unit(1, 0, expo);
    t.dir = unit(1, 0, dir);
    return t;
  };

  if (family == "tzitzeica") {
    sys.channels = 1;
    sys.terms = {one(1.0, QFactor::None, 2.0, 1.0), one(-1.0, QFactor::QQBar, -4.0, 1.0)};
  } else if (family == "tzitzeica_elliptic") {
    sys.channels = 1;
    sys.terms = {one(-1.0, QFactor::None, 2.0, 1.0), one(-1.0, QFactor::QQBar, -4.0, 1.0)};
  } else if (family == "uniformizing") {
    sys.channels = 1;
    sys.terms = {one(0.5, QFactor::None, 4.0, 1.0), one(-0.5, QFactor::QQBar, -4.0, 1.0)};
  } else if (family == "sinh_gordon") {
    sys.channels = 1;
    sys.terms = {one(1.0, QFactor::None, 2.0, 1.0), one(-1.0, QFactor::QQBar, -2.0, 1.0)};
  } else if (family == "sp4_quartic") {
    sys.channels = 2;
    ExpTerm t1, t2, t3;
    t1.k = 1.5;
    t1.expo = (VectorXcd(2) << 2.0, 2.0).finished();
    t1.dir = (VectorXcd(2) << 1.0, 1.0).finished();
    t2.k = -1.0;
    t2.qf = QFactor::QQBar;
    t2.expo = (VectorXcd(2) << -4.0, 0.0).finished();
    t2.dir = (VectorXcd(2) << 1.0, 0.0).finished();
    t3.k = -2.0;
    t3.expo = (VectorXcd(2) << 0.0, -4.0).finished();
    t3.dir = (VectorXcd(2) << 0.0, 1.0).finished();
    sys.terms = {t1, t2, t3};
  } else if (family == "g2_sextic") {
    sys.channels = 2;
    ExpTerm t1, t2, t3;
    t1.k = 5.0;
    t1.expo = (VectorXcd(2) << 2.0, -2.0).finished();
    t1.dir = (VectorXcd(2) << 1.0, -1.0).finished();
    t2.k = 3.0;
    t2.expo = (VectorXcd(2) << 0.0, 2.0).finished();
    t2.dir = (VectorXcd(2) << -1.0, 2.0).finished();
    t3.k = -1.0;
    t3.qf = QFactor::QQBar;
    t3.expo = (VectorXcd(2) << -4.0, -2.0).finished();
    t3.dir = (VectorXcd(2) << 1.0, 0.0).finished();
    sys.terms = {t1, t2, t3};
  } else if (family == "d23_superconformal" || family == "d2_signed") {
    std::vector<int> nu = signs;
    if (family == "d23_superconformal") {
      r = 2;
      nu = {1, -1, 1};
    }
    if (static_cast<int>(nu.size()) != r + 1)
      throw ConfigError("d2_signed needs r+1 signs");
    sys.channels = r;
    chain_terms(sys, r, nu);
    ExpTerm tq;  // nu_{r+1} q qbar e^{-2 w_r} feeding equation r
    tq.k = double(nu[r]);
    tq.qf = QFactor::QQBar;
    tq.expo = unit(r, r - 1, -2.0);
    tq.dir = unit(r, r - 1, 1.0);
    sys.terms.push_back(tq);
    sys.signs = nu;
  } else if (family == "b1_odd_definite" || family == "b1_odd_split") {
    // signs: eps_0 (= h_0), eps_1..eps_r, then the W-plane sign eps
    if (static_cast<int>(signs.size()) != r + 2)
      throw ConfigError(family + " needs eps_0..eps_r and the plane sign");
    sys.channels = r + 1;  // w_1..w_r, eta
    std::vector<int> nu(r);
    for (int j = 1; j <= r; ++j) nu[j - 1] = signs[j] * signs[j - 1];
    chain_terms(sys, r, nu);
    const int eta = r;  // channel index of eta
    const double er = signs[r], eps = signs[r + 1];
    if (family == "b1_odd_definite") {
      ExpTerm tp, tm;
      tp.k = eps * er / 2.0;
      tp.expo = unit(r + 1, eta, 2.0) + unit(r + 1, r - 1, -2.0);
      tp.dir = unit(r + 1, r - 1, 1.0) + unit(r + 1, eta, -1.0);
      tm.k = eps * er / 2.0;
      tm.qf = QFactor::QQBar;
      tm.expo = unit(r + 1, eta, -2.0) + unit(r + 1, r - 1, -2.0);
      tm.dir = unit(r + 1, r - 1, 1.0) + unit(r + 1, eta, 1.0);
      sys.terms.push_back(tp);
      sys.terms.push_back(tm);
    } else {
      ExpTerm tp, tm;  // conjugate pair carrying q e^{i eta} and qbar e^{-i eta}
      tp.k = er / 2.0;
      tp.qf = QFactor::Q;
      tp.expo = unit(r + 1, eta, I) + unit(r + 1, r - 1, -2.0);
      tp.dir = unit(r + 1, r - 1, 1.0) + unit(r + 1, eta, I);
      tm.k = er / 2.0;
      tm.qf = QFactor::QBar;
      tm.expo = unit(r + 1, eta, -I) + unit(r + 1, r - 1, -2.0);
      tm.dir = unit(r + 1, r - 1, 1.0) + unit(r + 1, eta, -I);
      sys.terms.push_back(tp);
      sys.terms.push_back(tm);
    }
  } else {
    throw ConfigError("unknown toda family: " + family);
  }

  for (int node = 0; node < g.size(); ++node)
    if (std::abs(q.samples.values[node]) < 1e-12) sys.flagged_q_nodes.push_back(node);
  return sys;
}

TodaSystem make_general_system(const lie::RootDatum& datum, const Grid2D& g,
                               const HoloDifferential& q, const std::vector<cplx>& k,
                               bool qqbar_on_affine_node) {
  const int l = datum.dim;
  if (static_cast<int>(k.size()) != l + 1)
    throw ConfigError("general system needs l+1 coefficients");
  for (int i = 0; i <= l; ++i)
    if (k[i] == cplx(0.0)) throw ConfigError("k_i must be nonzero");
  TodaSystem sys;
  sys.family = "general";
  sys.grid = g;
  sys.q = q;
  sys.channels = l;
  sys.datum = datum;
  const auto& a = datum.diagram.cartan;
  const auto& c = datum.diagram.comarks;
  for (int i = 0; i <= l; ++i) {
    ExpTerm t;
    t.k = k[i];
    if (i == 0 && qqbar_on_affine_node) t.qf = QFactor::QQBar;
    t.expo = VectorXcd::Zero(l);
    t.dir = VectorXcd::Zero(l);
    for (int ch = 1; ch <= l; ++ch) {
      t.expo[ch - 1] = 2.0 * a(ch, i);  // 2 alpha_i(Omega) in h-coordinates
      t.dir[ch - 1] = i == 0 ? -double(c[ch]) / c[0] : (ch == i ? 1.0 : 0.0);
    }
    sys.terms.push_back(t);
  }
  for (int node = 0; node < g.size(); ++node)
    if (std::abs(q.samples.values[node]) < 1e-12) sys.flagged_q_nodes.push_back(node);
  return sys;
}

namespace {

// sum of interaction terms at one node; throws on exponent overflow
VectorXd term_sum(const TodaSystem& sys, const ScalarField2D& omega, int i, int j) {
  const int n = sys.channels;
  const int node = sys.grid.node(i, j);
  VectorXcd acc = VectorXcd::Zero(n);
  for (const auto& t : sys.terms) {
    cplx arg = 0.0;
    for (int c = 0; c < n; ++c) arg += t.expo[c] * omega.at(i, j, c);
    if (std::abs(arg.real()) > kExpClamp)
      throw NumericError("exponent overflow at node " + std::to_string(node));
    acc += t.k * qfactor(sys, node, t.qf) * std::exp(arg) * t.dir;
  }
  VectorXd out(n);
  for (int c = 0; c < n; ++c) out[c] = acc[c].real();
  return out;
}

// channel-block derivative of term_sum with respect to omega at the node
MatrixXd term_jacobian(const TodaSystem& sys, const ScalarField2D& omega, int i, int j) {
  const int n = sys.channels;
  const int node = sys.grid.node(i, j);
  MatrixXd out = MatrixXd::Zero(n, n);
  for (const auto& t : sys.terms) {
    cplx arg = 0.0;
    for (int c = 0; c < n; ++c) arg += t.expo[c] * omega.at(i, j, c);
    const cplx w = t.k * qfactor(sys, node, t.qf) * std::exp(arg);
    for (int c = 0; c < n; ++c)
      for (int cc = 0; cc < n; ++cc) out(c, cc) += (w * t.dir[c] * t.expo[cc]).real();
  }
  return out;
}

}  // namespace

ScalarField2D residual(const TodaSystem& sys, const ScalarField2D& omega) {
  if (omega.channels != sys.channels) throw ConfigError("channel count mismatch");
  ScalarField2D r(sys.grid, sys.channels);
  for (int j = 0; j < sys.grid.ny; ++j)
    for (int i = 0; i < sys.grid.nx; ++i) {
      const VectorXd s = term_sum(sys, omega, i, j);
      for (int c = 0; c < sys.channels; ++c) {
        const double lap = 2.0 * grid::dzdzbar(omega, i, j, c);
        if (!std::isfinite(lap) || !std::isfinite(s[c]))
          throw NumericError("NaN in residual at node " +
                             std::to_string(sys.grid.node(i, j)));
        r.at(i, j, c) = lap - s[c];
      }
    }
  return r;
}

double residual_inf_norm(const TodaSystem& sys, const ScalarField2D& omega,
                         bool interior_only) {
  const ScalarField2D r = residual(sys, omega);
  double worst = 0.0;
  for (int j = 0; j < sys.grid.ny; ++j)
    for (int i = 0; i < sys.grid.nx; ++i) {
      if (interior_only && sys.grid.boundary(i, j)) continue;
      for (int c = 0; c < sys.channels; ++c)
        worst = std::max(worst, std::abs(r.at(i, j, c)));
    }
  return worst;
}

Linearization linearize(const TodaSystem& sys, const ScalarField2D& omega) {
  const Grid2D& g = sys.grid;
  const int n = sys.channels;
  Linearization lin;
  lin.channels = n;
  lin.unknown_of_node.assign(g.size(), -1);
  int nunk = 0;
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i)
      if (!g.boundary(i, j)) lin.unknown_of_node[g.node(i, j)] = nunk++;

  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(size_t(nunk) * n * (n + 5));
  const double cx = 0.5 / (g.dx() * g.dx());
  const double cy = 0.5 / (g.dy() * g.dy());
  auto wrap = [](int k, int m) { return ((k % m) + m) % m; };
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const int u = lin.unknown_of_node[g.node(i, j)];
      if (u < 0) continue;
      const MatrixXd blk = term_jacobian(sys, omega, i, j);
      for (int c = 0; c < n; ++c) {
        const int row = u * n + c;
        trip.emplace_back(row, row, -2.0 * (cx + cy));
        auto couple = [&](int ii, int jj, double w) {
          int iw = ii, jw = jj;
          if (g.topology == grid::Topology::Torus) {
            iw = wrap(ii, g.nx);
            jw = wrap(jj, g.ny);
          }
          const int v = lin.unknown_of_node[g.node(iw, jw)];
          if (v >= 0) trip.emplace_back(row, v * n + c, w);
        };
        couple(i - 1, j, cx);
        couple(i + 1, j, cx);
        couple(i, j - 1, cy);
        couple(i, j + 1, cy);
        for (int cc = 0; cc < n; ++cc) trip.emplace_back(row, u * n + cc, -blk(c, cc));
      }
    }
  lin.op.resize(nunk * n, nunk * n);
  lin.op.setFromTriplets(trip.begin(), trip.end());
  return lin;
}

ScalarField2D apply_linearization(const TodaSystem& sys, const ScalarField2D& omega,
                                  const ScalarField2D& delta) {
  ScalarField2D out(sys.grid, sys.channels);
  for (int j = 0; j < sys.grid.ny; ++j)
    for (int i = 0; i < sys.grid.nx; ++i) {
      if (sys.grid.boundary(i, j)) continue;
      const MatrixXd blk = term_jacobian(sys, omega, i, j);
      for (int c = 0; c < sys.channels; ++c) {
        double v = 2.0 * grid::dzdzbar(delta, i, j, c);
        for (int cc = 0; cc < sys.channels; ++cc) v -= blk(c, cc) * delta.at(i, j, cc);
        out.at(i, j, c) = v;
      }
    }
  return out;
}

namespace {

double interior_norm2(const TodaSystem& sys, const ScalarField2D& r) {
  double acc = 0.0;
  for (int j = 0; j < sys.grid.ny; ++j)
    for (int i = 0; i < sys.grid.nx; ++i) {
      if (sys.grid.boundary(i, j)) continue;
      for (int c = 0; c < sys.channels; ++c) acc += r.at(i, j, c) * r.at(i, j, c);
    }
  return acc;
}

}  // namespace

ScalarField2D solve_newton(const TodaSystem& sys, const ScalarField2D& init,
                           double tol, int max_iters, SolveReport* report) {
  SolveReport rep;
  ScalarField2D omega = init;
  ScalarField2D best = omega;
  double best_inf = std::numeric_limits<double>::infinity();

  for (int it = 0; it <= max_iters; ++it) {
    ScalarField2D r = residual(sys, omega);
    const double rinf = residual_inf_norm(sys, omega, true);
    rep.residual_history.push_back(rinf);
    if (rinf < best_inf) {
      best_inf = rinf;
      best = omega;
    }
    if (rinf < tol) {
      rep.converged = true;
      rep.iterations = it;
      rep.final_residual = rinf;
      rep.message = "converged";
      if (report) *report = rep;
      return omega;
    }
    if (it == max_iters) break;

    Linearization lin = linearize(sys, omega);
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    lu.compute(lin.op);
    if (lu.info() != Eigen::Success) {
      // crude conditioning hint from the factor diagonal
      rep.message = "singular linearization (factorization failed)";
      rep.iterations = it;
      rep.final_residual = rinf;
      if (report) *report = rep;
      throw NumericError(rep.message);
    }
    const int n = sys.channels;
    VectorXd rhs(lin.op.rows());
    for (int j = 0; j < sys.grid.ny; ++j)
      for (int i = 0; i < sys.grid.nx; ++i) {
        const int u = lin.unknown_of_node[sys.grid.node(i, j)];
        if (u < 0) continue;
        for (int c = 0; c < n; ++c) rhs[u * n + c] = -r.at(i, j, c);
      }
    const VectorXd step = lu.solve(rhs);

    const double phi0 = interior_norm2(sys, r);
    double t = 1.0;
    bool accepted = false;
    for (int ls = 0; ls < 40; ++ls) {
      ScalarField2D trial = omega;
      for (int j = 0; j < sys.grid.ny; ++j)
        for (int i = 0; i < sys.grid.nx; ++i) {
          const int u = lin.unknown_of_node[sys.grid.node(i, j)];
          if (u < 0) continue;
          for (int c = 0; c < n; ++c) trial.at(i, j, c) += t * step[u * n + c];
        }
      double phi1;
      try {
        phi1 = interior_norm2(sys, residual(sys, trial));
      } catch (const NumericError&) {
        t *= 0.5;
        continue;
      }
      if (phi1 <= (1.0 - 1e-4 * t) * phi0) {
        omega = trial;
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    if (!accepted) {
      rep.message = "line search stalled";
      rep.iterations = it;
      rep.final_residual = rinf;
      if (report) *report = rep;
      return best;
    }
  }
  rep.converged = false;
  rep.iterations = max_iters;
  rep.final_residual = best_inf;
  rep.message = "no convergence after max_iters";
  if (report) *report = rep;
  return best;
}

ScalarField2D constant_field(const Grid2D& g, const std::vector<double>& values) {
  ScalarField2D f(g, static_cast<int>(values.size()));
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i)
      for (size_t c = 0; c < values.size(); ++c)
        f.at(i, j, static_cast<int>(c)) = values[c];
  return f;
}

ScalarField2D random_field(const Grid2D& g, int channels, double amplitude,
                           unsigned seed, const std::vector<double>& boundary) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-amplitude, amplitude);
  ScalarField2D f(g, channels);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i)
      for (int c = 0; c < channels; ++c) {
        if (!boundary.empty() && g.boundary(i, j))
          f.at(i, j, c) = boundary[c];
        else
          f.at(i, j, c) = dist(rng);
      }
  return f;
}

ScalarField2D y_invariant_profile(const TodaSystem& sys, const std::vector<double>& left,
                                  const std::vector<double>& right, double tol,
                                  int max_iters) {
  // solve on a thin rectangle with the same x-discretization; y-invariance
  // makes the 2-D operator act as the 1-D one on y-independent fields
  const Grid2D& g = sys.grid;
  if (g.topology != grid::Topology::Rectangle)
    throw ConfigError("profile solve needs a rectangle grid");
  if (sys.q.coeffs.size() > 1)
    throw ConfigError("profile solve needs a constant differential");
  const int n = sys.channels;
  // iterate the 1-D Newton directly on an x-line
  std::vector<double> w(size_t(g.nx) * n, 0.0);
  for (int c = 0; c < n; ++c) {
    w[size_t(0) * n + c] = left[c];
    w[size_t(g.nx - 1) * n + c] = right[c];
    for (int i = 1; i < g.nx - 1; ++i) {
      const double s = double(i) / (g.nx - 1);
      w[size_t(i) * n + c] = (1 - s) * left[c] + s * right[c];
    }
  }
  const double hx = g.dx();
  auto line_residual = [&](const std::vector<double>& u, int i, VectorXd& out) {
    ScalarField2D probe(g, n);  // reuse term_sum via a tiny shim on row j = 0
    for (int c = 0; c < n; ++c) probe.at(i, 0, c) = u[size_t(i) * n + c];
    const VectorXd s = term_sum(sys, probe, i, 0);
    for (int c = 0; c < n; ++c) {
      const double lap =
          0.5 * (u[size_t(i - 1) * n + c] - 2 * u[size_t(i) * n + c] +
                 u[size_t(i + 1) * n + c]) /
          (hx * hx);
      out[c] = lap - s[c];
    }
  };
  const int m = (g.nx - 2) * n;
  for (int it = 0; it < max_iters; ++it) {
    VectorXd r(m);
    double rinf = 0.0;
    for (int i = 1; i < g.nx - 1; ++i) {
      VectorXd rc(n);
      line_residual(w, i, rc);
      for (int c = 0; c < n; ++c) {
        r[(i - 1) * n + c] = rc[c];
        rinf = std::max(rinf, std::abs(rc[c]));
      }
    }
    if (rinf < tol) break;
    std::vector<Eigen::Triplet<double>> trip;
    const double cx = 0.5 / (hx * hx);
    for (int i = 1; i < g.nx - 1; ++i) {
      ScalarField2D probe(g, n);
      for (int c = 0; c < n; ++c) probe.at(i, 0, c) = w[size_t(i) * n + c];
      const MatrixXd blk = term_jacobian(sys, probe, i, 0);
      for (int c = 0; c < n; ++c) {
        const int row = (i - 1) * n + c;
        trip.emplace_back(row, row, -2.0 * cx);
        if (i - 1 >= 1) trip.emplace_back(row, (i - 2) * n + c, cx);
        if (i + 1 <= g.nx - 2) trip.emplace_back(row, i * n + c, cx);
        for (int cc = 0; cc < n; ++cc) trip.emplace_back(row, (i - 1) * n + cc, -blk(c, cc));
      }
    }
    Eigen::SparseMatrix<double> op(m, m);
    op.setFromTriplets(trip.begin(), trip.end());
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    lu.compute(op);
    if (lu.info() != Eigen::Success) throw NumericError("singular 1-D linearization");
    VectorXd step = lu.solve(-r);
    for (int i = 1; i < g.nx - 1; ++i)
      for (int c = 0; c < n; ++c) w[size_t(i) * n + c] += step[(i - 1) * n + c];
  }
  ScalarField2D out(g, n);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i)
      for (int c = 0; c < n; ++c) out.at(i, j, c) = w[size_t(i) * n + c];
  return out;
}

}  // namespace atg::toda
