#pragma once

#include <functional>
#include <string>
#include <vector>

#include "atg/common.hpp"

namespace atg::grid {

enum class Topology { Torus, Rectangle };

/// Rectangular 2-D grid. Rectangle topology places nodes on [x0, x0+lx] x
/// [y0, y0+ly] inclusive of the boundary; the torus identifies opposite edges
/// so spacing is lx/nx.
struct Grid2D {
  int nx = 0, ny = 0;
  double x0 = 0.0, y0 = 0.0;
  double lx = 1.0, ly = 1.0;
  Topology topology = Topology::Rectangle;

  double dx() const { return topology == Topology::Torus ? lx / nx : lx / (nx - 1); }
  double dy() const { return topology == Topology::Torus ? ly / ny : ly / (ny - 1); }
  int size() const { return nx * ny; }
  int node(int i, int j) const { return j * nx + i; }
  double x(int i) const { return x0 + i * dx(); }
  double y(int j) const { return y0 + j * dy(); }
  cplx z(int i, int j) const { return {x(i), y(j)}; }
  bool boundary(int i, int j) const {
    return topology == Topology::Rectangle &&
           (i == 0 || j == 0 || i == nx - 1 || j == ny - 1);
  }
  // true if all nodes within `width` of (i,j) along axes exist without wrap
  bool interior(int i, int j, int width = 1) const {
    if (topology == Topology::Torus) return true;
    return i >= width && j >= width && i < nx - width && j < ny - width;
  }
};

Grid2D make_grid(int nx, int ny, double lx, double ly, Topology topo,
                 double x0 = 0.0, double y0 = 0.0);

/// Multi-channel nodal field; node-major storage.
template <typename T>
struct Field {
  Grid2D grid;
  int channels = 1;
  std::vector<T> values;

  Field() = default;
  Field(const Grid2D& g, int ch, T fill = T{})
      : grid(g), channels(ch), values(size_t(g.size()) * ch, fill) {}
  T& at(int i, int j, int c = 0) { return values[size_t(grid.node(i, j)) * channels + c]; }
  const T& at(int i, int j, int c = 0) const {
    return values[size_t(grid.node(i, j)) * channels + c];
  }
};

using ScalarField2D = Field<double>;
using ComplexField2D = Field<cplx>;

/// Grid of n x n complex matrices (connection coefficients, frames, ...).
struct MatrixField2D {
  Grid2D grid;
  int n = 0;
  std::vector<MatrixXcd> values;

  MatrixField2D() = default;
  MatrixField2D(const Grid2D& g, int dim)
      : grid(g), n(dim), values(g.size(), MatrixXcd::Zero(dim, dim)) {}
  MatrixXcd& at(int i, int j) { return values[grid.node(i, j)]; }
  const MatrixXcd& at(int i, int j) const { return values[grid.node(i, j)]; }
};

// Nodal first derivatives of a single channel. order = 2 uses 3-point centered
// stencils (one-sided at a rectangle boundary); order = 4 uses 5-point
// centered stencils where they fit and degrades gracefully near the boundary.
template <typename T>
T deriv_x(const Field<T>& f, int i, int j, int c, int order = 2);
template <typename T>
T deriv_y(const Field<T>& f, int i, int j, int c, int order = 2);

// d/dz = (d/dx - i d/dy)/2 and conjugate, promoted to complex.
template <typename T>
cplx deriv_z(const Field<T>& f, int i, int j, int c, int order = 2);
template <typename T>
cplx deriv_zbar(const Field<T>& f, int i, int j, int c, int order = 2);

// quarter Laplacian d^2/dz dzbar by 3-point second differences
template <typename T>
T dzdzbar(const Field<T>& f, int i, int j, int c);

/// Holomorphic (M+1)-differential sampled on a grid: constant or polynomial
/// in z. The torus admits constants only.
struct HoloDifferential {
  int degree = 0;                // M+1
  std::vector<cplx> coeffs;      // polynomial coefficients, ascending powers
  ComplexField2D samples;

  cplx eval(cplx z) const {
    cplx acc = 0.0, p = 1.0;
    for (const cplx& c : coeffs) {
      acc += c * p;
      p *= z;
    }
    return acc;
  }
};

HoloDifferential make_differential(const Grid2D& g, int degree,
                                   const std::vector<cplx>& coeffs);

// max |d q / dzbar| over interior nodes (discrete Cauchy-Riemann residual)
double cauchy_riemann_residual(const HoloDifferential& q);

}  // namespace atg::grid
