#pragma once

// Euler-angle parametrization of SU(2): gate(t) = Rz(theta2) Ry(theta1)
// Rz(theta3) with Ry(t) = exp(-i t Y / 2), Rz(t) = exp(-i t Z / 2), plus the
// alternate axis decompositions the circuit normalizer needs.

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <complex>
#include <stdexcept>

#include "qsynth/linalg.hpp"

namespace qsynth {

struct EulerTriple {
  double theta1 = 0.0;
  double theta2 = 0.0;
  double theta3 = 0.0;
};

inline Eigen::Matrix2cd rot_x(double t) {
  const double c = std::cos(0.5 * t), s = std::sin(0.5 * t);
  Eigen::Matrix2cd m;
  m << Complex(c, 0), Complex(0, -s), Complex(0, -s), Complex(c, 0);
  return m;
}

inline Eigen::Matrix2cd rot_y(double t) {
  const double c = std::cos(0.5 * t), s = std::sin(0.5 * t);
  Eigen::Matrix2cd m;
  m << Complex(c, 0), Complex(-s, 0), Complex(s, 0), Complex(c, 0);
  return m;
}

inline Eigen::Matrix2cd rot_z(double t) {
  Eigen::Matrix2cd m;
  m << std::polar(1.0, -0.5 * t), Complex(0, 0), Complex(0, 0), std::polar(1.0, 0.5 * t);
  return m;
}

inline Eigen::Matrix2cd euler_to_su2(const EulerTriple& t) {
  // expanded product of Rz(t2) Ry(t1) Rz(t3)
  const double c = std::cos(0.5 * t.theta1), s = std::sin(0.5 * t.theta1);
  const double sum = 0.5 * (t.theta2 + t.theta3);
  const double dif = 0.5 * (t.theta2 - t.theta3);
  Eigen::Matrix2cd m;
  m(0, 0) = c * std::polar(1.0, -sum);
  m(0, 1) = -s * std::polar(1.0, -dif);
  m(1, 0) = s * std::polar(1.0, dif);
  m(1, 1) = c * std::polar(1.0, sum);
  return m;
}

// d(gate)/d(theta_k), k in {0,1,2} for theta1, theta2, theta3
inline Eigen::Matrix2cd euler_to_su2_derivative(const EulerTriple& t, int k) {
  static const Eigen::Matrix2cd y = (Eigen::Matrix2cd() << 0, Complex(0, -1),
                                     Complex(0, 1), 0).finished();
  static const Eigen::Matrix2cd z = (Eigen::Matrix2cd() << 1, 0, 0, -1).finished();
  const Complex half(0, -0.5);
  switch (k) {
    case 0:
      return rot_z(t.theta2) * (half * y) * rot_y(t.theta1) * rot_z(t.theta3);
    case 1:
      return (half * z) * euler_to_su2(t);
    case 2:
      return euler_to_su2(t) * (half * z);
    default:
      throw std::out_of_range("euler_to_su2_derivative: k must be 0, 1 or 2");
  }
}

// Inverse of euler_to_su2. Exact for special unitary input (the phases are
// read off with atan2, including at the poles theta1 = 0, pi).
inline EulerTriple su2_to_euler(const Eigen::Matrix2cd& u) {
  if (std::abs(u.determinant() - Complex(1, 0)) > 1e-10)
    throw std::invalid_argument("su2_to_euler: determinant is not 1");
  if ((u.adjoint() * u - Eigen::Matrix2cd::Identity()).cwiseAbs().maxCoeff() > 1e-8)
    throw std::invalid_argument("su2_to_euler: input is not unitary");
  const Complex a = u(0, 0), b = u(1, 0);
  EulerTriple t;
  t.theta1 = 2.0 * std::atan2(std::abs(b), std::abs(a));
  const double arg_a = std::arg(a), arg_b = std::arg(b);
  t.theta2 = arg_b - arg_a;
  t.theta3 = -arg_a - arg_b;
  return t;
}

// v = Rz(c) Ry(b) Rx(a); returns {a, b, c}. Used where a trailing z-rotation
// must be split off a gate that precedes a control qubit.
inline std::array<double, 3> su2_to_zyx(const Eigen::Matrix2cd& v) {
  static const Eigen::Matrix2cd h = [] {
    Eigen::Matrix2cd m;
    const double r = 1.0 / std::sqrt(2.0);
    m << r, r, r, -r;
    return m;
  }();
  const Eigen::Matrix2cd w = Complex(0, -1) * (v * h);
  const EulerTriple t = su2_to_euler(w);
  constexpr double half_pi = 1.5707963267948966;
  return {t.theta3 - 2.0 * half_pi, t.theta1 - half_pi, t.theta2};
}

// v = Rx(c) Ry(b) Rx(a); returns {a, b, c}. Same role on target qubits.
inline std::array<double, 3> su2_to_xyx(const Eigen::Matrix2cd& v) {
  static const Eigen::Matrix2cd h = [] {
    Eigen::Matrix2cd m;
    const double r = 1.0 / std::sqrt(2.0);
    m << r, r, r, -r;
    return m;
  }();
  const EulerTriple t = su2_to_euler(h * v * h);
  return {t.theta3, -t.theta1, t.theta2};
}

}  // namespace qsynth
