#pragma once

#include <complex>
#include <numbers>

#include <Eigen/Dense>

namespace phase_engine {

using Complex = std::complex<double>;
using Mat2 = Eigen::Matrix2d;
using Vec2 = Eigen::Vector2d;
using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXcd;
using Eigen::VectorXd;

inline constexpr double kPi = std::numbers::pi;
inline constexpr Complex kI{0.0, 1.0};

// Oscillator parameters of the retained mode. Natural units keep
// omega0 = mass = 1 but nothing below assumes it.
struct SystemParams {
  double omega0 = 1.0;
  double mass = 1.0;
};

// Bose occupation; identically zero at T = 0.
inline double bose_occupation(double omega, double temperature) {
  if (temperature <= 0.0) return 0.0;
  return 1.0 / std::expm1(omega / temperature);
}

// coth(omega / 2T), the symmetrized thermal weight; 1 at T = 0.
inline double thermal_coth(double omega, double temperature) {
  if (temperature <= 0.0) return 1.0;
  return 1.0 / std::tanh(0.5 * omega / temperature);
}

}  // namespace phase_engine
