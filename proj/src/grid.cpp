#include "atg/grid.hpp"

#include <cmath>

namespace atg::grid {

Grid2D make_grid(int nx, int ny, double lx, double ly, Topology topo, double x0,
                 double y0) {
  if (nx < 8 || ny < 8) throw ConfigError("grid needs nx, ny >= 8");
  if (lx <= 0 || ly <= 0) throw ConfigError("grid extents must be positive");
  Grid2D g;
  g.nx = nx;
  g.ny = ny;
  g.lx = lx;
  g.ly = ly;
  g.x0 = x0;
  g.y0 = y0;
  g.topology = topo;
  return g;
}

namespace {

inline int wrap(int k, int n) { return ((k % n) + n) % n; }

template <typename T>
T sample(const Field<T>& f, int i, int j, int c) {
  if (f.grid.topology == Topology::Torus)
    return f.at(wrap(i, f.grid.nx), wrap(j, f.grid.ny), c);
  return f.at(i, j, c);
}

// one-dimensional derivative along axis 0 (x) or 1 (y)
template <typename T>
T deriv_axis(const Field<T>& f, int i, int j, int c, int axis, int order) {
  const int n = axis == 0 ? f.grid.nx : f.grid.ny;
  const double h = axis == 0 ? f.grid.dx() : f.grid.dy();
  const int k = axis == 0 ? i : j;
  auto v = [&](int s) {
    return axis == 0 ? sample(f, i + s, j, c) : sample(f, i, j + s, c);
  };
  const bool torus = f.grid.topology == Topology::Torus;
  if (order >= 4 && (torus || (k >= 2 && k <= n - 3)))
    return (v(-2) - 8.0 * v(-1) + 8.0 * v(1) - v(2)) / (12.0 * h);
  if (torus || (k >= 1 && k <= n - 2)) return (v(1) - v(-1)) / (2.0 * h);
  if (k == 0) return (-3.0 * v(0) + 4.0 * v(1) - v(2)) / (2.0 * h);
  return (3.0 * v(0) - 4.0 * v(-1) + v(-2)) / (2.0 * h);
}

template <typename T>
T second_axis(const Field<T>& f, int i, int j, int c, int axis) {
  const int n = axis == 0 ? f.grid.nx : f.grid.ny;
  const double h = axis == 0 ? f.grid.dx() : f.grid.dy();
  const int k = axis == 0 ? i : j;
  auto v = [&](int s) {
    return axis == 0 ? sample(f, i + s, j, c) : sample(f, i, j + s, c);
  };
  const bool torus = f.grid.topology == Topology::Torus;
  if (torus || (k >= 1 && k <= n - 2)) return (v(1) - 2.0 * v(0) + v(-1)) / (h * h);
  if (k == 0) return (v(0) - 2.0 * v(1) + v(2)) / (h * h);  // one-sided, O(h)
  return (v(0) - 2.0 * v(-1) + v(-2)) / (h * h);
}

}  // namespace

template <typename T>
T deriv_x(const Field<T>& f, int i, int j, int c, int order) {
  return deriv_axis(f, i, j, c, 0, order);
}
template <typename T>
T deriv_y(const Field<T>& f, int i, int j, int c, int order) {
  return deriv_axis(f, i, j, c, 1, order);
}
template <typename T>
cplx deriv_z(const Field<T>& f, int i, int j, int c, int order) {
  return 0.5 * (cplx(deriv_x(f, i, j, c, order)) - I * cplx(deriv_y(f, i, j, c, order)));
}
template <typename T>
cplx deriv_zbar(const Field<T>& f, int i, int j, int c, int order) {
  return 0.5 * (cplx(deriv_x(f, i, j, c, order)) + I * cplx(deriv_y(f, i, j, c, order)));
}
template <typename T>
T dzdzbar(const Field<T>& f, int i, int j, int c) {
  return 0.25 * (second_axis(f, i, j, c, 0) + second_axis(f, i, j, c, 1));
}

template double deriv_x<double>(const Field<double>&, int, int, int, int);
template double deriv_y<double>(const Field<double>&, int, int, int, int);
template cplx deriv_x<cplx>(const Field<cplx>&, int, int, int, int);
template cplx deriv_y<cplx>(const Field<cplx>&, int, int, int, int);
template cplx deriv_z<double>(const Field<double>&, int, int, int, int);
template cplx deriv_z<cplx>(const Field<cplx>&, int, int, int, int);
template cplx deriv_zbar<double>(const Field<double>&, int, int, int, int);
template cplx deriv_zbar<cplx>(const Field<cplx>&, int, int, int, int);
template double dzdzbar<double>(const Field<double>&, int, int, int);
template cplx dzdzbar<cplx>(const Field<cplx>&, int, int, int);

HoloDifferential make_differential(const Grid2D& g, int degree,
                                   const std::vector<cplx>& coeffs) {
  if (g.topology == Topology::Torus && coeffs.size() > 1)
    throw ConfigError("holomorphic differentials on a torus are constant");
  HoloDifferential q;
  q.degree = degree;
  q.coeffs = coeffs.empty() ? std::vector<cplx>{cplx(0.0)} : coeffs;
  q.samples = ComplexField2D(g, 1);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) q.samples.at(i, j) = q.eval(g.z(i, j));
  return q;
}

double cauchy_riemann_residual(const HoloDifferential& q) {
  const Grid2D& g = q.samples.grid;
  double worst = 0.0;
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      if (!g.interior(i, j)) continue;
      worst = std::max(worst, std::abs(deriv_zbar(q.samples, i, j, 0)));
    }
  return worst;
}

}  // namespace atg::grid
