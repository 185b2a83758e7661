#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Sparse>

#include "atg/grid.hpp"
#include "atg/lie.hpp"

namespace atg::toda {

using grid::ComplexField2D;
using grid::Grid2D;
using grid::HoloDifferential;
using grid::ScalarField2D;

enum class QFactor { None, Q, QBar, QQBar };

/// One interaction term k * q-factor * exp(expo . Omega) * dir.
/// Channels are real; complex expo/dir always appear in conjugate pairs so
/// residuals stay real.
struct ExpTerm {
  cplx k{1.0, 0.0};
  QFactor qf = QFactor::None;
  VectorXcd expo;
  VectorXcd dir;
};

/// A Toda-type elliptic system 2 Omega_zzbar = sum_t k_t e^{expo_t . Omega} dir_t
/// on a 2-D grid; named families populate the term list.
struct TodaSystem {
  std::string family;
  int channels = 1;
  std::vector<ExpTerm> terms;
  Grid2D grid;
  HoloDifferential q;
  std::vector<int> flagged_q_nodes;               // nodes with |q| < 1e-12
  std::optional<lie::RootDatum> datum;            // general family only
  std::vector<int> signs;                         // mu/epsilon pattern, if any
};

// family in {tzitzeica, tzitzeica_elliptic, uniformizing, sinh_gordon,
// sp4_quartic, g2_sextic, d23_superconformal, d2_signed, b1_odd_definite,
// b1_odd_split}. `signs` carries the family sign pattern where one exists
// (d2_signed: nu_1..nu_{r+1}; b1_odd_*: eps_0..eps_r then the plane sign).
TodaSystem make_system(const std::string& family, const Grid2D& g,
                       const HoloDifferential& q, const std::vector<int>& signs = {},
                       int r = 2);

// general family from realized affine data; k has l+1 entries, k[0] may be
// flagged to carry q qbar via qqbar_on_affine_node.
TodaSystem make_general_system(const lie::RootDatum& datum, const Grid2D& g,
                               const HoloDifferential& q, const std::vector<cplx>& k,
                               bool qqbar_on_affine_node);

/// r = 2 Omega_zzbar - sum_t ..., channel-resolved. Rectangle boundary nodes
/// use one-sided second differences and are O(h) there.
ScalarField2D residual(const TodaSystem& sys, const ScalarField2D& omega);

double residual_inf_norm(const TodaSystem& sys, const ScalarField2D& omega,
                         bool interior_only = true);

/// Sparse linearization about omega over the solver's unknown layout
/// (all nodes on a torus, interior nodes on a rectangle).
struct Linearization {
  Eigen::SparseMatrix<double> op;
  std::vector<int> unknown_of_node;  // -1 for Dirichlet nodes
  int channels = 0;
};

Linearization linearize(const TodaSystem& sys, const ScalarField2D& omega);

// dense action of the linearization on a full field (interior rows only)
ScalarField2D apply_linearization(const TodaSystem& sys, const ScalarField2D& omega,
                                  const ScalarField2D& delta);

struct SolveReport {
  bool converged = false;
  int iterations = 0;
  double final_residual = 0.0;
  std::vector<double> residual_history;
  std::string message;
};

/// Damped Newton with Armijo backtracking and sparse direct solves. Dirichlet
/// data is taken from the boundary nodes of `init` and held fixed.
ScalarField2D solve_newton(const TodaSystem& sys, const ScalarField2D& init,
                           double tol, int max_iters, SolveReport* report = nullptr);

// initial data helpers
ScalarField2D constant_field(const Grid2D& g, const std::vector<double>& values);
ScalarField2D random_field(const Grid2D& g, int channels, double amplitude,
                           unsigned seed, const std::vector<double>& boundary = {});

// 1-D y-invariant profile solve of the same system on the grid's x-line with
// Dirichlet end data; returns a y-invariant 2-D field (smooth boundary data
// generator for rectangle solves).
ScalarField2D y_invariant_profile(const TodaSystem& sys,
                                  const std::vector<double>& left,
                                  const std::vector<double>& right, double tol,
                                  int max_iters);

}  // namespace atg::toda
