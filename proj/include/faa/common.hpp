// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>

#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

namespace faa {

using cplx = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;
using RVector = Eigen::VectorXd;
using Vec3 = Eigen::Vector3d;
using Positions = Eigen::Matrix3Xd; // one column per element, meters

inline constexpr double kPi = std::numbers::pi;

// Precondition violated on an input value (infeasible psi, xi outside [0,1], ...).
class DomainError : public std::domain_error {
  public:
    using std::domain_error::domain_error;
};

// An iterative or factorization step could not produce a result.
class NumericalError : public std::runtime_error {
  public:
    NumericalError(const std::string &what, double last_residual = 0.0)
        : std::runtime_error(what), residual_(last_residual) {}
    double residual() const noexcept { return residual_; }

  private:
    double residual_;
};

inline constexpr double deg_to_rad(double deg) { return deg * kPi / 180.0; }
inline constexpr double rad_to_deg(double rad) { return rad * 180.0 / kPi; }

} // namespace faa
