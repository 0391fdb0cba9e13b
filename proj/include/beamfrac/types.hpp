#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <array>
#include <stdexcept>
#include <string>

namespace beamfrac {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using VecX = Eigen::VectorXd;
using MatX = Eigen::MatrixXd;
using SpMat = Eigen::SparseMatrix<double>;
using Triplet = Eigen::Triplet<double>;

/// Base class for all errors raised by the library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Element geometry collapsed below the configurable tangent-norm floor.
struct DegenerateElementError : Error {
  using Error::Error;
};

/// Interface mean tangent vanished and no cached normal is available.
struct DegenerateNormalError : Error {
  using Error::Error;
};

/// Quasi-static step failed to converge; carries the last residual norm.
struct StepFailureError : Error {
  StepFailureError(const std::string& msg, double residual)
      : Error(msg), residual_norm(residual) {}
  double residual_norm;
};

/// The linear solver reported a singular or ill-posed system.
struct LinearSolveError : Error {
  using Error::Error;
};

/// Explicit dynamics produced a non-finite state.
struct DivergenceError : Error {
  using Error::Error;
};

/// Config file parsing or validation failure; carries a 1-based line number
/// (0 when the error is not tied to a specific line).
struct ConfigError : Error {
  ConfigError(const std::string& msg, int line_no = 0)
      : Error(line_no > 0 ? "line " + std::to_string(line_no) + ": " + msg
                          : msg),
        line(line_no) {}
  int line;
};

/// File-system failure while writing run outputs.
struct IoError : Error {
  using Error::Error;
};

/// Skew-symmetric cross-product matrix: skew(a)*b == a.cross(b).
inline Mat3 skew(const Vec3& a) {
  Mat3 s;
  s << 0.0, -a.z(), a.y(), a.z(), 0.0, -a.x(), -a.y(), a.x(), 0.0;
  return s;
}

/// Fixed 4-point Gauss-Legendre rule on [-1, 1]; exact through degree 7,
/// which covers the consistent mass integrand (degree 6) exactly.
struct GaussRule {
  static constexpr int n = 4;
  static constexpr std::array<double, 4> xi = {
      -0.8611363115940525752239465, -0.3399810435848562648026658,
      0.3399810435848562648026658, 0.8611363115940525752239465};
  static constexpr std::array<double, 4> w = {
      0.3478548451374538573730639, 0.6521451548625461426269361,
      0.6521451548625461426269361, 0.3478548451374538573730639};
};

}  // namespace beamfrac
