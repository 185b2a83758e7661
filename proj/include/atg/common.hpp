#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace atg {

using cplx = std::complex<double>;
using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXcd;
using Eigen::VectorXd;

constexpr cplx I{0.0, 1.0};

/// Base class for all toolkit errors; carries a plain what() message.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class NumericError : public Error {
 public:
  using Error::Error;
};

inline double frob_norm(const MatrixXcd& m) { return m.norm(); }

inline MatrixXcd commutator(const MatrixXcd& a, const MatrixXcd& b) {
  return a * b - b * a;
}

}  // namespace atg
