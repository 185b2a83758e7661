#include "atg/develop.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "atg/octonion.hpp"

namespace atg::dev {

using gauge::ConnectionField;
using toda::ScalarField2D;
using toda::TodaSystem;

namespace {

// RK4 step of dF/dt = sign * F * C(t) over [t, t+h] with C linear in t
MatrixXcd rk4_step(const MatrixXcd& f, double t, double h, double sign,
                   const MatrixXcd& c0, const MatrixXcd& c1) {
  auto cat = [&](double s) { return MatrixXcd((1.0 - s) * c0 + s * c1); };
  const MatrixXcd k1 = sign * f * cat(t);
  const MatrixXcd k2 = sign * (f + 0.5 * h * k1) * cat(t + 0.5 * h);
  const MatrixXcd k3 = sign * (f + 0.5 * h * k2) * cat(t + 0.5 * h);
  const MatrixXcd k4 = sign * (f + h * k3) * cat(t + h);
  return f + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

MatrixXcd edge_coefficient(const ConnectionField& conn, int i, int j, cplx zdot) {
  return conn.a_z.at(i, j) * zdot + conn.a_zbar.at(i, j) * std::conj(zdot);
}

// transports F along adjacent-node path; sign -1 matches dF = -F A
std::vector<MatrixXcd> transport_frames(const ConnectionField& conn,
                                        const std::vector<NodeRef>& path,
                                        const MatrixXcd& start, int substeps,
                                        double sign) {
  std::vector<MatrixXcd> out;
  out.reserve(path.size());
  MatrixXcd f = start;
  out.push_back(f);
  for (size_t k = 1; k < path.size(); ++k) {
    const auto [i0, j0] = path[k - 1];
    const auto [i1, j1] = path[k];
    const int di = i1 - i0, dj = j1 - j0;
    if (std::abs(di) + std::abs(dj) != 1)
      throw ConfigError("transport path must follow grid edges");
    const cplx zdot = cplx(di * conn.grid.dx(), dj * conn.grid.dy());
    const MatrixXcd c0 = edge_coefficient(conn, i0, j0, zdot);
    const MatrixXcd c1 = edge_coefficient(conn, i1, j1, zdot);
    const double h = 1.0 / substeps;
    for (int s = 0; s < substeps; ++s) f = rk4_step(f, s * h, h, sign, c0, c1);
    if (f.norm() > 1e8) throw NumericError("frame blow-up during transport");
    out.push_back(f);
  }
  return out;
}

}  // namespace

FramePath parallel_transport(const ConnectionField& conn,
                             const std::vector<NodeRef>& path,
                             const MatrixXcd& start_frame, int substeps) {
  for (const auto& [i, j] : path)
    if (i < 0 || j < 0 || i >= conn.grid.nx || j >= conn.grid.ny)
      throw ConfigError("transport path leaves the grid");
  FramePath fp;
  fp.nodes = path;
  fp.substeps = substeps;
  fp.frames = transport_frames(conn, path, start_frame, substeps, -1.0);
  const cplx d0 = fp.frames.front().determinant();
  for (const auto& f : fp.frames)
    fp.det_drift = std::max(fp.det_drift, std::abs(f.determinant() - d0));
  return fp;
}

double loop_holonomy_defect(const ConnectionField& conn, int i0, int j0, int side_i,
                            int side_j, int substeps) {
  std::vector<NodeRef> loop;
  for (int s = 0; s <= side_i; ++s) loop.push_back({i0 + s, j0});
  for (int s = 1; s <= side_j; ++s) loop.push_back({i0 + side_i, j0 + s});
  for (int s = 1; s <= side_i; ++s) loop.push_back({i0 + side_i - s, j0 + side_j});
  for (int s = 1; s <= side_j; ++s) loop.push_back({i0, j0 + side_j - s});
  const auto frames = transport_frames(
      conn, loop, MatrixXcd::Identity(conn.a_z.n, conn.a_z.n), substeps, -1.0);
  return (frames.back() - MatrixXcd::Identity(conn.a_z.n, conn.a_z.n)).norm();
}

namespace {

VectorXcd section_vector(const TodaSystem& sys, int n) {
  VectorXcd s = VectorXcd::Zero(n);
  if (sys.family == "tzitzeica") {
    s[1] = 1.0;  // the trivial factor of K + 1 + K^{-1}
  } else if (sys.family == "d2_signed" || sys.family == "d23_superconformal") {
    s[sys.channels] = 1.0;  // e_0 in frame order e_{-r}..e_{r+1}
  } else if (sys.family == "b1_odd_definite") {
    s[sys.channels] = 1.0;  // e_0 in frame order e_{-r-1}..e_{r+1}
  } else if (sys.family == "g2_sextic") {
    s[3] = 1.0;  // e_0 = i
  } else {
    throw ConfigError("no distinguished section for family " + sys.family);
  }
  return s;
}

double expected_h0(const TodaSystem& sys) {
  if (sys.family == "b1_odd_definite") return sys.signs[0];
  return 1.0;
}

// columns spanning the fixed set of the antilinear map v -> Lam conj(v)
MatrixXcd real_fixed_basis(const MatrixXcd& lam) {
  const int n = static_cast<int>(lam.rows());
  MatrixXd m(2 * n, 2 * n);
  m.topLeftCorner(n, n) = lam.real() - MatrixXd::Identity(n, n);
  m.topRightCorner(n, n) = lam.imag();
  m.bottomLeftCorner(n, n) = lam.imag();
  m.bottomRightCorner(n, n) = -(lam.real() + MatrixXd::Identity(n, n));
  Eigen::JacobiSVD<MatrixXd> svd(m, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  int kernel = 0;
  for (int k = 0; k < sv.size(); ++k)
    if (sv[k] < 1e-8 * sv[0]) ++kernel;
  if (kernel != n)
    throw NumericError("real structure kernel has dimension " + std::to_string(kernel));
  MatrixXcd b(n, n);
  for (int k = 0; k < n; ++k) {
    const VectorXd v = svd.matrixV().col(2 * n - 1 - k);
    b.col(k) = v.head(n).cast<cplx>() + I * v.tail(n).cast<cplx>();
  }
  return b;
}

}  // namespace

DevelopResult develop_immersion(const TodaSystem& sys, const ScalarField2D& omega,
                                double loop_tol, int substeps) {
  const ConnectionField conn = gauge::assemble_connection(sys, omega);
  const Grid2D& g = conn.grid;
  const int n = conn.a_z.n;

  DevelopResult res;
  // flatness pre-check on a few interior loops
  const int ib = g.nx / 2, jb = g.ny / 2;
  for (int side : {2, 4, 8}) {
    if (ib + side >= g.nx - 1 || jb + side >= g.ny - 1) continue;
    res.max_loop_defect =
        std::max(res.max_loop_defect, loop_holonomy_defect(conn, ib, jb, side, side));
  }
  if (res.max_loop_defect > loop_tol)
    throw NumericError("connection failed the loop flatness pre-check: defect " +
                       std::to_string(res.max_loop_defect));

  // spanning tree: base row first, then vertical branches (dF = +F A)
  res.frames.assign(g.size(), MatrixXcd());
  {
    std::vector<NodeRef> row;
    for (int i = ib; i >= 0; --i) row.push_back({i, jb});
    auto fr = transport_frames(conn, row, MatrixXcd::Identity(n, n), substeps, +1.0);
    for (size_t k = 0; k < row.size(); ++k) res.frames[g.node(row[k].first, jb)] = fr[k];
    row.clear();
    for (int i = ib; i < g.nx; ++i) row.push_back({i, jb});
    fr = transport_frames(conn, row, MatrixXcd::Identity(n, n), substeps, +1.0);
    for (size_t k = 0; k < row.size(); ++k) res.frames[g.node(row[k].first, jb)] = fr[k];
    for (int i = 0; i < g.nx; ++i) {
      std::vector<NodeRef> col;
      for (int j = jb; j >= 0; --j) col.push_back({i, j});
      fr = transport_frames(conn, col, res.frames[g.node(i, jb)], substeps, +1.0);
      for (size_t k = 0; k < col.size(); ++k) res.frames[g.node(i, col[k].second)] = fr[k];
      col.clear();
      for (int j = jb; j < g.ny; ++j) col.push_back({i, j});
      fr = transport_frames(conn, col, res.frames[g.node(i, jb)], substeps, +1.0);
      for (size_t k = 0; k < col.size(); ++k) res.frames[g.node(i, col[k].second)] = fr[k];
    }
  }

  // real structure in the developed gauge: F Lambda conj(F)^{-1}, constant up
  // to transport error; take it at the base point
  const MatrixXcd lam0 = gauge::rep_point_data(sys, omega, ib, jb).lambda_mat;
  for (int probe_i : {1, g.nx / 4, g.nx - 2}) {
    const int pj = jb;
    const MatrixXcd f = res.frames[g.node(probe_i, pj)];
    const MatrixXcd lam =
        f * gauge::rep_point_data(sys, omega, probe_i, pj).lambda_mat *
        f.conjugate().inverse();
    res.real_structure_drift = std::max(res.real_structure_drift, (lam - lam0).norm());
  }
  MatrixXcd basis = real_fixed_basis(lam0);

  ImmersionSample& imm = res.immersion;
  imm.grid = g;
  imm.ambient = n;
  imm.section_label = sys.family;
  const gauge::Involutions inv = gauge::involutions_for(sys);

  if (inv.S.size() > 0) {
    // diagonalize the real bilinear form over the lambda-fixed basis
    MatrixXcd gc = basis.transpose() * inv.S * basis;
    MatrixXd gr = gc.real();
    if (gc.imag().norm() > 1e-8 * (1.0 + gr.norm()))
      throw NumericError("bilinear form not real on the lambda-fixed subspace");
    gr = 0.5 * (gr + gr.transpose());
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(gr);
    std::vector<int> order(n);
    for (int k = 0; k < n; ++k) order[k] = k;
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return es.eigenvalues()[a] > es.eigenvalues()[b]; });
    MatrixXcd nb(n, n);
    imm.form = MatrixXd::Zero(n, n);
    imm.sig_p = imm.sig_q = 0;
    for (int k = 0; k < n; ++k) {
      const double ev = es.eigenvalues()[order[k]];
      if (std::abs(ev) < 1e-10) throw NumericError("degenerate developed form");
      nb.col(k) = basis * es.eigenvectors().col(order[k]).cast<cplx>() /
                  std::sqrt(std::abs(ev));
      imm.form(k, k) = ev > 0 ? 1.0 : -1.0;
      (ev > 0 ? imm.sig_p : imm.sig_q) += 1;
    }
    basis = nb;
  } else {
    // volume normalization for the affine-sphere target: det = +i
    cplx det = basis.determinant();
    basis /= std::pow(std::abs(det), 1.0 / n);
    det = basis.determinant();
    if (std::abs(det.real()) > 1e-6)
      throw NumericError("unexpected real determinant phase in sl3 development");
    if (det.imag() < 0) basis.col(0) *= -1.0;
    imm.form = MatrixXd::Identity(n, n);
    imm.sig_p = n;
    imm.sig_q = 0;
  }
  res.real_basis = basis;

  const VectorXcd s = section_vector(sys, n);
  imm.h0 = expected_h0(sys);
  imm.points.assign(g.size(), VectorXd());
  const MatrixXcd binv = basis.inverse();
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const VectorXcd w = binv * (res.frames[g.node(i, j)] * s);
      imm.max_real_deviation = std::max(imm.max_real_deviation, w.imag().norm());
      imm.points[g.node(i, j)] = w.real();
    }

  if (inv.S.size() > 0) {
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i) {
        const VectorXd& p = imm.at(i, j);
        imm.max_quadric_deviation =
            std::max(imm.max_quadric_deviation, std::abs(imm.pair(p, p) - imm.h0));
      }
    // conformality <phi_z, phi_z> from finite differences of the development
    grid::Field<cplx> pf(g, n);
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i)
        for (int c = 0; c < n; ++c) pf.at(i, j, c) = imm.at(i, j)[c];
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i) {
        if (!g.interior(i, j, 2)) continue;
        VectorXcd pz(n);
        for (int c = 0; c < n; ++c) pz[c] = grid::deriv_z(pf, i, j, c, 4);
        imm.max_conformal_deviation =
            std::max(imm.max_conformal_deviation, std::abs(imm.pairc(pz, pz)));
      }
  }
  return res;
}

HarmonicSequence harmonic_sequence(const ImmersionSample& imm, int r, int deriv_order) {
  if (2 * r + 2 > imm.ambient + 1)
    throw ConfigError("isotropy order exceeds the representation bound");
  const Grid2D& g = imm.grid;
  const int n = imm.ambient;
  HarmonicSequence seq;
  seq.r = r;
  seq.margin = (deriv_order >= 4 ? 2 : 1) * (r + 1);

  std::vector<VectorXcd> cur(g.size());
  for (int node = 0; node < g.size(); ++node)
    cur[node] = imm.points[node].cast<cplx>();
  seq.ladder.push_back(cur);
  seq.h_values.push_back(std::vector<double>(g.size(), imm.h0));

  double scale0 = 0.0;
  for (int step = 0; step <= r; ++step) {
    const auto& prev = seq.ladder[step];
    grid::Field<cplx> pf(g, n);
    for (int node = 0; node < g.size(); ++node)
      for (int c = 0; c < n; ++c) pf.values[size_t(node) * n + c] = prev[node][c];
    std::vector<VectorXcd> next(g.size(), VectorXcd::Zero(n));
    std::vector<double> hnext(g.size(), 0.0);
    double nmax = 0.0;
    double hmin_rel = std::numeric_limits<double>::infinity();
    int hmin_node = -1;
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i) {
        if (!seq.usable(g, i, j)) continue;
        VectorXcd dz(n);
        for (int c = 0; c < n; ++c) dz[c] = grid::deriv_z(pf, i, j, c, deriv_order);
        const int node = g.node(i, j);
        if (step >= 1) {
          const double hi = seq.h_values[step][node];
          const cplx proj = imm.pairc(dz, prev[node].conjugate()) / hi;
          next[node] = dz - proj * prev[node];
        } else {
          next[node] = dz;  // phi_1 = phi_z
        }
        const cplx h = imm.pairc(next[node], next[node].conjugate());
        hnext[node] = h.real();
        const double nn = next[node].squaredNorm();
        if (nn > 1e-28 && std::abs(h) / nn < hmin_rel) {
          hmin_rel = std::abs(h) / nn;
          hmin_node = node;
        }
        nmax = std::max(nmax, next[node].norm());
      }
    if (step == 0) scale0 = std::max(1.0, nmax);
    if (step == r) {
      // top rung: either superminimal (vanishing) or the holomorphic q
      if (nmax < 1e-6 * scale0) {
        seq.superminimal = true;
        seq.ladder.push_back(next);
        break;
      }
    } else if (hmin_rel < 1e-8) {
      seq.first_degenerate_index = step + 1;
      throw NumericError("isotropy degeneracy: h_" + std::to_string(step + 1) +
                         " vanishes near node " + std::to_string(hmin_node));
    }
    seq.ladder.push_back(next);
    if (step < r) seq.h_values.push_back(hnext);
  }

  // q recovered from <phi_{r+1}, phi_{r+1}>
  seq.q_recovered.assign(g.size(), 0.0);
  if (static_cast<int>(seq.ladder.size()) == r + 2) {
    const auto& top = seq.ladder[r + 1];
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i) {
        if (!seq.usable(g, i, j)) continue;
        const int node = g.node(i, j);
        seq.q_recovered[node] = imm.pairc(top[node], top[node]);
      }
  }

  // pairwise Hermitian orthogonality and isotropy of the ladder
  for (int j = 0; j < g.ny; j += 3)
    for (int i = 0; i < g.nx; i += 3) {
      if (!seq.usable(g, i, j)) continue;
      const int node = g.node(i, j);
      for (int a = 0; a <= r; ++a)
        for (int b = 0; b <= r; ++b) {
          const double na = seq.ladder[a][node].norm();
          const double nb = seq.ladder[b][node].norm();
          if (na < 1e-14 || nb < 1e-14) continue;
          if (a != b) {
            const cplx herm =
                imm.pairc(seq.ladder[a][node], seq.ladder[b][node].conjugate());
            seq.max_orthogonality_defect =
                std::max(seq.max_orthogonality_defect, std::abs(herm) / (na * nb));
          }
          if (a >= 1 && b >= 1) {
            const cplx bil = imm.pairc(seq.ladder[a][node], seq.ladder[b][node]);
            seq.max_orthogonality_defect =
                std::max(seq.max_orthogonality_defect, std::abs(bil) / (na * nb));
          }
        }
    }
  return seq;
}

AffineSphereReport affine_sphere_check(const ImmersionSample& imm, int deriv_order) {
  if (imm.ambient != 3) throw ConfigError("affine sphere check expects R^3 data");
  const Grid2D& g = imm.grid;
  grid::Field<double> pf(g, 3);
  for (int node = 0; node < g.size(); ++node)
    for (int c = 0; c < 3; ++c) pf.values[size_t(node) * 3 + c] = imm.points[node][c];

  const int w = deriv_order >= 4 ? 2 : 1;
  auto dfield = [&](const grid::Field<double>& f, int axis) {
    grid::Field<double> out(g, f.channels);
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i)
        for (int c = 0; c < f.channels; ++c)
          out.at(i, j, c) = axis == 0 ? grid::deriv_x(f, i, j, c, deriv_order)
                                      : grid::deriv_y(f, i, j, c, deriv_order);
    return out;
  };
  const auto fx = dfield(pf, 0), fy = dfield(pf, 1);
  const auto fxx = dfield(fx, 0), fxy = dfield(fx, 1), fyy = dfield(fy, 1);

  auto vec3 = [&](const grid::Field<double>& f, int i, int j) {
    return Eigen::Vector3d(f.at(i, j, 0), f.at(i, j, 1), f.at(i, j, 2));
  };

  AffineSphereReport rep;
  rep.min_metric_det = std::numeric_limits<double>::infinity();
  // Blaschke metric field h = sgn G / |det G|^{1/4}, G_ab = det[f_x f_y f_ab]
  grid::Field<double> hf(g, 3);  // h_xx, h_xy, h_yy
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      if (!g.interior(i, j, 2 * w)) continue;
      Eigen::Matrix3d m;
      m.col(0) = vec3(fx, i, j);
      m.col(1) = vec3(fy, i, j);
      Eigen::Matrix2d gq;
      m.col(2) = vec3(fxx, i, j);
      gq(0, 0) = m.determinant();
      m.col(2) = vec3(fxy, i, j);
      gq(0, 1) = gq(1, 0) = m.determinant();
      m.col(2) = vec3(fyy, i, j);
      gq(1, 1) = m.determinant();
      const double d = gq.determinant();
      if (d <= 0) throw NumericError("indefinite Blaschke form in affine sphere check");
      rep.min_metric_det = std::min(rep.min_metric_det, d);
      const double sgn = gq(0, 0) > 0 ? 1.0 : -1.0;
      const double scl = sgn / std::pow(d, 0.25);
      hf.at(i, j, 0) = gq(0, 0) * scl;
      hf.at(i, j, 1) = gq(0, 1) * scl;
      hf.at(i, j, 2) = gq(1, 1) * scl;
    }
  // affine normal xi = 1/2 Laplace_h f (divergence form)
  grid::Field<double> flux(g, 6);  // sqrt(det h) h^{ab} f_b for a = x, y
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      if (!g.interior(i, j, 2 * w)) continue;
      Eigen::Matrix2d h;
      h << hf.at(i, j, 0), hf.at(i, j, 1), hf.at(i, j, 1), hf.at(i, j, 2);
      const Eigen::Matrix2d hinv = h.inverse();
      const double sq = std::sqrt(h.determinant());
      const Eigen::Vector3d gx = vec3(fx, i, j), gy = vec3(fy, i, j);
      for (int c = 0; c < 3; ++c) {
        flux.at(i, j, c) = sq * (hinv(0, 0) * gx[c] + hinv(0, 1) * gy[c]);
        flux.at(i, j, 3 + c) = sq * (hinv(1, 0) * gx[c] + hinv(1, 1) * gy[c]);
      }
    }
  grid::Field<double> xi(g, 3);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      if (!g.interior(i, j, 3 * w)) continue;
      Eigen::Matrix2d h;
      h << hf.at(i, j, 0), hf.at(i, j, 1), hf.at(i, j, 1), hf.at(i, j, 2);
      const double sq = std::sqrt(h.determinant());
      for (int c = 0; c < 3; ++c) {
        const double div = grid::deriv_x(flux, i, j, c, deriv_order) +
                           grid::deriv_y(flux, i, j, 3 + c, deriv_order);
        xi.at(i, j, c) = 0.5 * div / sq;
      }
      const Eigen::Vector3d xiv(xi.at(i, j, 0), xi.at(i, j, 1), xi.at(i, j, 2));
      rep.max_normal_deviation =
          std::max(rep.max_normal_deviation, (xiv - vec3(pf, i, j)).norm());
    }
  // shape operator from D_X xi = -S(X)
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      if (!g.interior(i, j, 4 * w)) continue;
      Eigen::Matrix3d frame;
      frame.col(0) = vec3(fx, i, j);
      frame.col(1) = vec3(fy, i, j);
      frame.col(2) = Eigen::Vector3d(xi.at(i, j, 0), xi.at(i, j, 1), xi.at(i, j, 2));
      Eigen::Vector3d dxix, dxiy;
      for (int c = 0; c < 3; ++c) {
        dxix[c] = grid::deriv_x(xi, i, j, c, deriv_order);
        dxiy[c] = grid::deriv_y(xi, i, j, c, deriv_order);
      }
      const Eigen::Vector3d cx = frame.colPivHouseholderQr().solve(dxix);
      const Eigen::Vector3d cy = frame.colPivHouseholderQr().solve(dxiy);
      Eigen::Matrix2d s;
      s << -cx[0], -cy[0], -cx[1], -cy[1];
      const double dev = (s + Eigen::Matrix2d::Identity()).norm() +
                         std::abs(cx[2]) + std::abs(cy[2]);
      rep.max_shape_deviation = std::max(rep.max_shape_deviation, dev);
    }
  return rep;
}

double almost_complex_residual(const TodaSystem& sys, const ScalarField2D& omega) {
  if (sys.family != "g2_sextic")
    throw ConfigError("almost-complex check needs the g2 family");
  const gauge::ConnectionField conn = gauge::assemble_connection(sys, omega);
  const MatrixXcd oct = octo::g2_basis_map();
  VectorXcd s = VectorXcd::Zero(7);
  s[3] = 1.0;
  const VectorXcd s_oct = oct * s;
  double worst = 0.0;
  for (int j = 0; j < sys.grid.ny; ++j)
    for (int i = 0; i < sys.grid.nx; ++i) {
      if (!sys.grid.interior(i, j, 2)) continue;
      const VectorXcd v = conn.a_z.at(i, j) * s;  // grad_z s, s constant
      const VectorXcd v_oct = oct * v;
      worst = std::max(worst,
                       (octo::cross_complex(s_oct, v_oct) - I * v_oct).norm() /
                           std::max(1.0, v_oct.norm()));
    }
  return worst;
}

double almost_complex_residual_developed(const DevelopResult& dev, int deriv_order) {
  const ImmersionSample& imm = dev.immersion;
  if (imm.ambient != 7) throw ConfigError("expected a 7-dimensional development");
  const Grid2D& g = imm.grid;
  // map developed coordinates back through the real basis into the g2 module,
  // then into octonions; the cross product is parallel so one dictionary works
  const MatrixXcd to_oct = octo::g2_basis_map() * dev.real_basis;
  grid::Field<double> pf(g, 7);
  for (int node = 0; node < g.size(); ++node)
    for (int c = 0; c < 7; ++c) pf.values[size_t(node) * 7 + c] = imm.points[node][c];
  double worst = 0.0;
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      if (!g.interior(i, j, 2)) continue;
      VectorXcd p(7), pz(7);
      for (int c = 0; c < 7; ++c) {
        p[c] = pf.at(i, j, c);
        pz[c] = grid::deriv_z(pf, i, j, c, deriv_order);
      }
      const VectorXcd po = to_oct * p, pzo = to_oct * pz;
      worst = std::max(worst, (octo::cross_complex(po, pzo) - I * pzo).norm() /
                                  std::max(1.0, pzo.norm()));
    }
  return worst;
}

double quadric_tension_residual(const ImmersionSample& imm, int deriv_order) {
  const Grid2D& g = imm.grid;
  const int n = imm.ambient;
  grid::Field<double> pf(g, n);
  for (int node = 0; node < g.size(); ++node)
    for (int c = 0; c < n; ++c) pf.values[size_t(node) * n + c] = imm.points[node][c];
  const int w = deriv_order >= 4 ? 2 : 1;
  double worst = 0.0;
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      if (!g.interior(i, j, 2 * w)) continue;
      VectorXcd pz(n), pzb(n), pzzb(n);
      for (int c = 0; c < n; ++c) {
        pz[c] = grid::deriv_z(pf, i, j, c, deriv_order);
        pzb[c] = std::conj(pz[c]);
        pzzb[c] = grid::dzdzbar(pf, i, j, c);
      }
      const cplx lam = -imm.pairc(pz, pzb) / imm.h0;
      const VectorXcd p = imm.points[g.node(i, j)].cast<cplx>();
      worst = std::max(worst, (pzzb - lam * p).norm());
    }
  return worst;
}

ConvexFoliatedReport verify_convex_foliated(cplx z, double theta) {
  const double x = z.real(), y = z.imag();
  if (y <= 0) throw ConfigError("convex-foliated check needs Im z > 0");
  if (std::abs(std::cos(theta)) < 1e-12)
    throw ConfigError("theta = pi/2 pole: boundary point at infinity");
  ConvexFoliatedReport rep;
  rep.a = x + y * (1.0 + std::sin(theta)) / std::cos(theta);
  const double c = std::sqrt(1.5);
  const double sn = std::sin(0.5 * theta - 0.25 * M_PI);
  const double cs = std::cos(0.5 * theta - 0.25 * M_PI);
  rep.a1 = c * sn / y;
  rep.a2 = c * cs - c * (x / y) * sn;
  rep.deviation = std::abs(rep.a * rep.a1 + rep.a2) /
                  std::max({1.0, std::abs(rep.a1), std::abs(rep.a2)});
  return rep;
}

double uniformizing_section_deviation(const TodaSystem& sys,
                                      const ScalarField2D& omega, double a, double b,
                                      int substeps) {
  if (sys.family != "uniformizing")
    throw ConfigError("section transport check needs the uniformizing family");
  const ConnectionField conn = gauge::assemble_connection(sys, omega);
  const Grid2D& g = conn.grid;
  auto closed_form = [&](int i, int j) {
    const cplx z = g.z(i, j);
    const double y = z.imag();
    const cplx s2 = (a * z + b) * std::exp(I * M_PI / 4.0);
    return (VectorXcd(2) << std::conj(s2) / (std::sqrt(2.0) * y), s2).finished();
  };
  // transport the section along each row from the mid-column (dv = -A v)
  const int ib = g.nx / 2;
  double worst = 0.0;
  for (int j = 1; j < g.ny - 1; ++j) {
    for (int dir : {-1, +1}) {
      VectorXcd v = closed_form(ib, j);
      for (int i = ib; (dir > 0 ? i < g.nx - 1 : i > 0); i += dir) {
        const cplx zdot = cplx(dir * g.dx(), 0.0);
        const MatrixXcd c0 = edge_coefficient(conn, i, j, zdot);
        const MatrixXcd c1 = edge_coefficient(conn, i + dir, j, zdot);
        const double h = 1.0 / substeps;
        for (int ss = 0; ss < substeps; ++ss) {
          auto cat = [&](double t) { return MatrixXcd((1.0 - t) * c0 + t * c1); };
          const double t = ss * h;
          const VectorXcd k1 = -cat(t) * v;
          const VectorXcd k2 = -cat(t + h / 2) * (v + h / 2 * k1);
          const VectorXcd k3 = -cat(t + h / 2) * (v + h / 2 * k2);
          const VectorXcd k4 = -cat(t + h) * (v + h * k3);
          v += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        }
        worst = std::max(worst, (v - closed_form(i + dir, j)).norm());
      }
    }
  }
  return worst;
}

}  // namespace atg::dev
