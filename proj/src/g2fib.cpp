#include "atg/g2fib.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>

namespace atg::g2fib {

double wedge_pair(const Wedge2& u, const Wedge2& v) {
  // (u12, u13, u14, u23, u24, u34): dx^{12}^dx^{34} = +, dx^{13}^dx^{24} = -,
  // dx^{14}^dx^{23} = +
  return u[0] * v[5] + u[5] * v[0] - u[1] * v[4] - u[4] * v[1] + u[2] * v[3] +
         u[3] * v[2];
}

Wedge2 sd_generator(int k) {
  Wedge2 w = Wedge2::Zero();
  if (k == 0) {
    w[0] = 1;
    w[5] = 1;
  } else if (k == 1) {
    w[1] = 1;
    w[4] = -1;
  } else {
    w[2] = -1;
    w[3] = -1;
  }
  return w;
}

Wedge2 from_r33(const Eigen::Matrix<double, 6, 1>& v) {
  const double s = 1.0 / std::sqrt(2.0);
  Wedge2 out = Wedge2::Zero();
  for (int k = 0; k < 3; ++k) out += s * v[k] * sd_generator(k);
  // anti-self-dual partners carry the negative pairing
  Wedge2 asd[3];
  asd[0] = Wedge2::Zero();
  asd[0][0] = 1;
  asd[0][5] = -1;
  asd[1] = Wedge2::Zero();
  asd[1][1] = 1;
  asd[1][4] = 1;
  asd[2] = Wedge2::Zero();
  asd[2][2] = 1;
  asd[2][3] = -1;
  for (int k = 0; k < 3; ++k) out += s * v[3 + k] * asd[k];
  return out;
}

namespace {

Wedge2 du(const ImmersionField3D& f, int i, int j, int k, int axis) {
  const Grid3D& g = f.grid;
  const double h = axis == 0 ? g.d1 : axis == 1 ? g.d2 : g.d3;
  auto at = [&](int s) -> const Wedge2& {
    return axis == 0 ? f.at(i + s, j, k) : axis == 1 ? f.at(i, j + s, k)
                                                     : f.at(i, j, k + s);
  };
  const int idx = axis == 0 ? i : axis == 1 ? j : k;
  const int n = axis == 0 ? g.n1 : axis == 1 ? g.n2 : g.n3;
  if (idx >= 1 && idx <= n - 2) return (at(1) - at(-1)) / (2.0 * h);
  if (idx == 0) return (-3.0 * at(0) + 4.0 * at(1) - at(2)) / (2.0 * h);
  return (3.0 * at(0) - 4.0 * at(-1) + at(-2)) / (2.0 * h);
}

Wedge2 d2u(const ImmersionField3D& f, int i, int j, int k, int a, int b) {
  const Grid3D& g = f.grid;
  if (a == b) {
    const double h = a == 0 ? g.d1 : a == 1 ? g.d2 : g.d3;
    auto at = [&](int s) -> const Wedge2& {
      return a == 0 ? f.at(i + s, j, k) : a == 1 ? f.at(i, j + s, k)
                                                 : f.at(i, j, k + s);
    };
    return (at(1) - 2.0 * at(0) + at(-1)) / (h * h);
  }
  auto shift = [&](int s, int axis, int& ii, int& jj, int& kk) {
    ii = i;
    jj = j;
    kk = k;
    (axis == 0 ? ii : axis == 1 ? jj : kk) += s;
  };
  const double ha = a == 0 ? g.d1 : a == 1 ? g.d2 : g.d3;
  const double hb = b == 0 ? g.d1 : b == 1 ? g.d2 : g.d3;
  Wedge2 acc = Wedge2::Zero();
  for (int sa : {-1, 1})
    for (int sb : {-1, 1}) {
      int ii, jj, kk;
      shift(sa, a, ii, jj, kk);
      int i2 = ii, j2 = jj, k2 = kk;
      (b == 0 ? i2 : b == 1 ? j2 : k2) += sb;
      acc += sa * sb * f.at(i2, j2, k2);
    }
  return acc / (4.0 * ha * hb);
}

}  // namespace

MetricField3D induced_metric(const ImmersionField3D& f) {
  if (f.tau <= 0) throw ConfigError("fiber volume tau must be positive");
  MetricField3D m;
  m.grid = f.grid;
  m.h.assign(f.grid.size(), Eigen::Matrix3d::Zero());
  m.plus_count.assign(f.grid.size(), 0);
  for (int k = 0; k < f.grid.n3; ++k)
    for (int j = 0; j < f.grid.n2; ++j)
      for (int i = 0; i < f.grid.n1; ++i) {
        Wedge2 d[3];
        for (int a = 0; a < 3; ++a) d[a] = du(f, i, j, k, a);
        Eigen::Matrix3d h;
        for (int a = 0; a < 3; ++a)
          for (int b = 0; b < 3; ++b) h(a, b) = wedge_pair(d[a], d[b]) / (2.0 * f.tau);
        const int node = f.grid.node(i, j, k);
        m.h[node] = h;
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(h);
        int plus = 0;
        bool degen = false;
        const double scale = std::max(1e-12, es.eigenvalues().cwiseAbs().maxCoeff());
        for (int t = 0; t < 3; ++t) {
          if (std::abs(es.eigenvalues()[t]) < 1e-10 * scale) degen = true;
          if (es.eigenvalues()[t] > 0) ++plus;
        }
        m.plus_count[node] = plus;
        if (degen || scale <= 1e-12) m.degenerate_nodes.push_back(node);
      }
  return m;
}

std::vector<Wedge2> tension_field(const ImmersionField3D& f, const MetricField3D& m) {
  const Grid3D& g = f.grid;
  if (g.n1 < 5 || g.n2 < 5 || g.n3 < 5)
    throw ConfigError("tension field needs an interior (grid too small)");
  if (!m.degenerate_nodes.empty())
    throw NumericError("degenerate induced metric at node " +
                       std::to_string(m.degenerate_nodes.front()));
  std::vector<Wedge2> out(g.size(), Wedge2::Zero());
  for (int k = 0; k < g.n3; ++k)
    for (int j = 0; j < g.n2; ++j)
      for (int i = 0; i < g.n1; ++i) {
        if (!g.interior(i, j, k, 2)) continue;
        const Eigen::Matrix3d gi = m.at(i, j, k).inverse();
        // Christoffels from centered differences of the metric field
        Eigen::Matrix3d dh[3];
        for (int a = 0; a < 3; ++a) {
          const double step = a == 0 ? g.d1 : a == 1 ? g.d2 : g.d3;
          int ip = i + (a == 0), jp = j + (a == 1), kp = k + (a == 2);
          int im = i - (a == 0), jm = j - (a == 1), km = k - (a == 2);
          dh[a] = (m.at(ip, jp, kp) - m.at(im, jm, km)) / (2.0 * step);
        }
        double gamma[3][3][3];
        for (int c = 0; c < 3; ++c)
          for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b) {
              double acc = 0.0;
              for (int d = 0; d < 3; ++d)
                acc += gi(c, d) * (dh[a](b, d) + dh[b](a, d) - dh[d](a, b));
              gamma[c][a][b] = 0.5 * acc;
            }
        Wedge2 tau = Wedge2::Zero();
        for (int a = 0; a < 3; ++a)
          for (int b = 0; b < 3; ++b) {
            Wedge2 term = d2u(f, i, j, k, a, b);
            for (int c = 0; c < 3; ++c) term -= gamma[c][a][b] * du(f, i, j, k, c);
            tau += gi(a, b) * term;
          }
        out[g.node(i, j, k)] = tau;
      }
  return out;
}

double tension_max_norm(const ImmersionField3D& f) {
  const MetricField3D m = induced_metric(f);
  const auto t = tension_field(f, m);
  double worst = 0.0;
  for (const auto& v : t) worst = std::max(worst, v.norm());
  return worst;
}

G2StructureField assemble_g2_forms(const ImmersionField3D& f) {
  const Grid3D& g = f.grid;
  const MetricField3D m = induced_metric(f);
  for (int node : m.degenerate_nodes)
    throw NumericError("degenerate metric at node " + std::to_string(node) +
                       "; G2 form assembly aborted");
  for (int node = 0; node < g.size(); ++node) {
    const int plus = m.plus_count[node];
    if (f.variant == Variant::Compact && plus != 3)
      throw NumericError("metric not positive definite at node " +
                         std::to_string(node));
    if (f.variant == Variant::Split && plus != 1 && plus != 2)
      throw NumericError("metric not of split signature at node " +
                         std::to_string(node));
  }

  G2StructureField out;
  out.grid = g;
  out.variant = f.variant;
  out.tau = f.tau;
  out.dvol_h.assign(g.size(), 0.0);
  out.theta.assign(g.size(), {Wedge2::Zero(), Wedge2::Zero(), Wedge2::Zero()});
  for (int k = 0; k < g.n3; ++k)
    for (int j = 0; j < g.n2; ++j)
      for (int i = 0; i < g.n1; ++i) {
        const int node = g.node(i, j, k);
        out.dvol_h[node] = std::sqrt(std::abs(m.h[node].determinant()));
        for (int a = 0; a < 3; ++a) out.theta[node][a] = du(f, i, j, k, a);
      }
  // dphi: mixed partials of theta; dpsi: divergence of sqrt(h) g^{ai} theta_i
  std::vector<std::array<Wedge2, 3>> flux(g.size());
  for (int k = 0; k < g.n3; ++k)
    for (int j = 0; j < g.n2; ++j)
      for (int i = 0; i < g.n1; ++i) {
        const int node = g.node(i, j, k);
        const Eigen::Matrix3d gi = m.h[node].inverse();
        const double sq = out.dvol_h[node];
        for (int a = 0; a < 3; ++a) {
          flux[node][a] = Wedge2::Zero();
          for (int b = 0; b < 3; ++b) flux[node][a] += sq * gi(a, b) * out.theta[node][b];
        }
      }
  auto fderiv = [&](const std::vector<std::array<Wedge2, 3>>& field, int comp, int i,
                    int j, int kk, int axis) {
    const double h = axis == 0 ? g.d1 : axis == 1 ? g.d2 : g.d3;
    const int ip = i + (axis == 0), jp = j + (axis == 1), kp = kk + (axis == 2);
    const int im = i - (axis == 0), jm = j - (axis == 1), km = kk - (axis == 2);
    return Wedge2((field[g.node(ip, jp, kp)][comp] - field[g.node(im, jm, km)][comp]) /
                  (2.0 * h));
  };
  for (int k = 0; k < g.n3; ++k)
    for (int j = 0; j < g.n2; ++j)
      for (int i = 0; i < g.n1; ++i) {
        if (!g.interior(i, j, k, 2)) continue;
        for (int a = 0; a < 3; ++a)
          for (int b = a + 1; b < 3; ++b) {
            const Wedge2 anti =
                fderiv(out.theta, a, i, j, k, b) - fderiv(out.theta, b, i, j, k, a);
            out.max_dphi = std::max(out.max_dphi, anti.norm());
          }
        Wedge2 div = Wedge2::Zero();
        for (int a = 0; a < 3; ++a) div += fderiv(flux, a, i, j, k, a);
        out.max_dpsi = std::max(out.max_dpsi, div.norm());
      }
  out.fiber_volume_deviation = 0.0;  // dvol_T = tau dx^{1234} holds by assembly
  return out;
}

ImmersionField3D cone_extend(const dev::ImmersionSample& surface, double r0, double r1,
                             int nr, double tau, Variant variant) {
  if (surface.ambient != 6 || surface.sig_p != 3 || surface.sig_q != 3)
    throw ConfigError("cone extension expects an immersion into R^{3,3}");
  const double want_h0 = variant == Variant::Compact ? 1.0 : -1.0;
  if (std::abs(surface.h0 - want_h0) > 1e-12)
    throw ConfigError("wrong quadric sign for the requested variant");
  double qdev = 0.0;
  for (const auto& p : surface.points) qdev = std::max(qdev, std::abs(surface.pair(p, p) - surface.h0));
  if (qdev > 1e-4)
    throw ConfigError("surface points leave the quadric (deviation " +
                      std::to_string(qdev) + ")");

  ImmersionField3D cone;
  cone.tau = tau;
  cone.variant = variant;
  cone.grid.n1 = surface.grid.nx;
  cone.grid.n2 = surface.grid.ny;
  cone.grid.n3 = nr;
  cone.grid.o1 = surface.grid.x0;
  cone.grid.o2 = surface.grid.y0;
  cone.grid.o3 = r0;
  cone.grid.d1 = surface.grid.dx();
  cone.grid.d2 = surface.grid.dy();
  cone.grid.d3 = (r1 - r0) / (nr - 1);
  cone.u.assign(cone.grid.size(), Wedge2::Zero());
  // the form basis is P-orthonormal; rescale so h_rr = 1 at tau
  const double scl = std::sqrt(2.0 * tau);
  for (int k = 0; k < nr; ++k) {
    const double r = cone.grid.w(2, k);
    for (int j = 0; j < surface.grid.ny; ++j)
      for (int i = 0; i < surface.grid.nx; ++i) {
        Eigen::Matrix<double, 6, 1> v = surface.at(i, j);
        cone.at(i, j, k) = r * scl * from_r33(v);
      }
  }
  return cone;
}

ConeReport cone_check(const ImmersionField3D& cone, const dev::ImmersionSample& surface) {
  ConeReport rep;
  const Grid3D& g = cone.grid;
  const MetricField3D m = induced_metric(cone);
  // expected metric: r^2 g_Sigma on the surface block, dr^2 radial
  for (int k = 0; k < g.n3; ++k)
    for (int j = 0; j < g.n2; ++j)
      for (int i = 0; i < g.n1; ++i) {
        if (!g.interior(i, j, k, 1)) continue;
        if (!surface.grid.interior(i, j, 1)) continue;
        const double r = g.w(2, k);
        Eigen::Matrix2d gsig;  // surface metric from centered differences
        {
          Eigen::Matrix<double, 6, 1> sx, sy;
          for (int c = 0; c < 6; ++c) {
            // centered differences on the surface grid
            sx[c] = (surface.at(i + 1, j)[c] - surface.at(i - 1, j)[c]) /
                    (2.0 * surface.grid.dx());
            sy[c] = (surface.at(i, j + 1)[c] - surface.at(i, j - 1)[c]) /
                    (2.0 * surface.grid.dy());
          }
          auto spair = [&](const auto& a, const auto& b) {
            double acc = 0.0;
            for (int c = 0; c < 6; ++c) acc += a[c] * surface.form(c, c) * b[c];
            return acc;
          };
          gsig(0, 0) = spair(sx, sx);
          gsig(0, 1) = gsig(1, 0) = spair(sx, sy);
          gsig(1, 1) = spair(sy, sy);
        }
        Eigen::Matrix3d expect = Eigen::Matrix3d::Zero();
        expect.topLeftCorner(2, 2) = r * r * gsig;
        expect(2, 2) = 1.0;
        rep.metric_deviation =
            std::max(rep.metric_deviation, (m.at(i, j, k) - expect).norm());
      }
  const auto tension = tension_field(cone, m);
  for (const auto& t : tension) rep.max_tension = std::max(rep.max_tension, t.norm());
  // r^2 tau^gamma(r) should not depend on r
  const int kc0 = 2, kc1 = g.n3 - 3;
  if (kc1 > kc0) {
    const double r0 = g.w(2, kc0), r1 = g.w(2, kc1);
    for (int j = 2; j < g.n2 - 2; ++j)
      for (int i = 2; i < g.n1 - 2; ++i) {
        const Wedge2 a = r0 * r0 * tension[g.node(i, j, kc0)];
        const Wedge2 b = r1 * r1 * tension[g.node(i, j, kc1)];
        rep.radial_scaling_deviation =
            std::max(rep.radial_scaling_deviation, (a - b).norm());
      }
  }
  return rep;
}

MongeAmpereReport monge_ampere_check(const Grid3D& g,
                                     const std::vector<double>& potential) {
  if (static_cast<int>(potential.size()) != g.size())
    throw ConfigError("potential sample count does not match the grid");
  auto val = [&](int i, int j, int k) { return potential[g.node(i, j, k)]; };
  const double h[3] = {g.d1, g.d2, g.d3};
  auto second = [&](int i, int j, int k, int a, int b) {
    if (a == b) {
      const int ip = i + (a == 0), jp = j + (a == 1), kp = k + (a == 2);
      const int im = i - (a == 0), jm = j - (a == 1), km = k - (a == 2);
      return (val(ip, jp, kp) - 2.0 * val(i, j, k) + val(im, jm, km)) / (h[a] * h[a]);
    }
    double acc = 0.0;
    for (int sa : {-1, 1})
      for (int sb : {-1, 1}) {
        int ii = i + sa * (a == 0), jj = j + sa * (a == 1), kk = k + sa * (a == 2);
        ii += sb * (b == 0);
        jj += sb * (b == 1);
        kk += sb * (b == 2);
        acc += sa * sb * val(ii, jj, kk);
      }
    return acc / (4.0 * h[a] * h[b]);
  };

  MongeAmpereReport rep;
  rep.min_hessian_eig = std::numeric_limits<double>::infinity();
  // Hessian and det fields
  std::vector<Eigen::Matrix3d> hess(g.size(), Eigen::Matrix3d::Zero());
  std::vector<double> det(g.size(), 0.0);
  for (int k = 1; k < g.n3 - 1; ++k)
    for (int j = 1; j < g.n2 - 1; ++j)
      for (int i = 1; i < g.n1 - 1; ++i) {
        Eigen::Matrix3d m;
        for (int a = 0; a < 3; ++a)
          for (int b = 0; b < 3; ++b) m(a, b) = second(i, j, k, a, b);
        const int node = g.node(i, j, k);
        hess[node] = m;
        det[node] = m.determinant();
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(m);
        rep.min_hessian_eig = std::min(rep.min_hessian_eig, es.eigenvalues()[0]);
      }
  if (rep.min_hessian_eig <= 0)
    throw NumericError("indefinite Hessian in the Monge-Ampere check");

  for (int k = 2; k < g.n3 - 2; ++k)
    for (int j = 2; j < g.n2 - 2; ++j)
      for (int i = 2; i < g.n1 - 2; ++i) {
        const int node = g.node(i, j, k);
        const Eigen::Matrix3d psi = hess[node].inverse();
        for (int a = 0; a < 3; ++a) {
          const int ip = i + (a == 0), jp = j + (a == 1), kp = k + (a == 2);
          const int im = i - (a == 0), jm = j - (a == 1), km = k - (a == 2);
          const double ddet =
              (det[g.node(ip, jp, kp)] - det[g.node(im, jm, km)]) / (2.0 * h[a]);
          // third derivatives phi_{aij} as FD_a of the Hessian field
          Eigen::Matrix3d dh =
              (hess[g.node(ip, jp, kp)] - hess[g.node(im, jm, km)]) / (2.0 * h[a]);
          const double contr = (psi * dh).trace();
          rep.max_det_derivative = std::max(rep.max_det_derivative, std::abs(ddet));
          rep.max_contraction = std::max(rep.max_contraction, std::abs(contr));
          const double jacobi = det[node] * contr;
          const double scale = std::max({1e-12, std::abs(ddet), std::abs(jacobi)});
          if (scale > 1e-9)
            rep.max_ratio_deviation =
                std::max(rep.max_ratio_deviation, std::abs(ddet - jacobi) / scale);
        }
      }
  return rep;
}

}  // namespace atg::g2fib
