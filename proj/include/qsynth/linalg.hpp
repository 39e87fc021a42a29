#pragma once

// Dense complex linear algebra on 2^n-dimensional spaces: Kronecker products,
// Haar-random unitaries, polar projection to the closest unitary, partial
// trace down to one qubit, and in-place application of embedded gates.
//
// Convention used throughout: qubit 0 is the most significant bit of the
// basis-state index, so qubit q carries weight 2^(n-1-q).

#include <Eigen/Dense>
#include <complex>
#include <cmath>
#include <stdexcept>
#include <string>

#include "qsynth/rng.hpp"

namespace qsynth {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;

struct DegenerateEnvironmentError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline ComplexMatrix identity(Eigen::Index dim) {
  return ComplexMatrix::Identity(dim, dim);
}

// max-abs entry of U^dag U - I
inline double unitarity_error(const ComplexMatrix& u) {
  return (u.adjoint() * u - identity(u.rows())).cwiseAbs().maxCoeff();
}

inline bool is_unitary(const ComplexMatrix& u, double tol = 1e-12) {
  return u.rows() == u.cols() && unitarity_error(u) <= tol;
}

// Kronecker product; the first factor owns the most significant index bits.
inline ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

// Haar measure via complex Ginibre + QR, with the R-diagonal phase fix
// Q <- Q diag(r_kk / |r_kk|).
inline ComplexMatrix haar_random_unitary(int n_qubits, Rng& rng) {
  if (n_qubits < 1) throw std::invalid_argument("haar_random_unitary: n_qubits must be >= 1");
  const Eigen::Index dim = Eigen::Index{1} << n_qubits;
  ComplexMatrix z(dim, dim);
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  for (Eigen::Index i = 0; i < dim; ++i)
    for (Eigen::Index j = 0; j < dim; ++j)
      z(i, j) = Complex(rng.normal(), rng.normal()) * inv_sqrt2;
  Eigen::HouseholderQR<ComplexMatrix> qr(z);
  ComplexMatrix q = qr.householderQ() * ComplexMatrix::Identity(dim, dim);
  const ComplexMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index k = 0; k < dim; ++k) {
    const Complex d = r(k, k);
    const double m = std::abs(d);
    q.col(k) *= (m == 0.0) ? Complex(1.0) : d / m;
  }
  return q;
}

namespace detail {

// Closed-form SVD of a 2x2 complex matrix through the eigensystem of a^dag a.
// Returns X, Y and singular values s0 >= s1 with a = X diag(s0, s1) Y^dag.
struct Svd2x2 {
  Eigen::Matrix2cd x;
  Eigen::Matrix2cd y;
  double s0;
  double s1;
};

inline Svd2x2 svd_2x2(const Eigen::Matrix2cd& a) {
  const Eigen::Matrix2cd h = a.adjoint() * a;
  const double h00 = h(0, 0).real();
  const double h11 = h(1, 1).real();
  const Complex off = h(0, 1);
  const double mean = 0.5 * (h00 + h11);
  const double delta = 0.5 * (h00 - h11);
  const double rad = std::sqrt(delta * delta + std::norm(off));
  const double lam0 = mean + rad;

  Svd2x2 out;
  out.s0 = std::sqrt(std::max(lam0, 0.0));
  // the small eigenvalue of a^dag a cancels badly; s0 s1 = |det a| does not
  out.s1 = out.s0 > 0.0 ? std::abs(a.determinant()) / out.s0
                        : std::sqrt(std::max(mean - rad, 0.0));

  Eigen::Vector2cd v0;
  const double scale = std::max({std::abs(h00), std::abs(h11), std::abs(off)});
  if (std::abs(off) <= 1e-30 * std::max(scale, 1e-300)) {
    // already diagonal; order eigenvectors by eigenvalue
    v0 = (h00 >= h11) ? Eigen::Vector2cd(1, 0) : Eigen::Vector2cd(0, 1);
  } else {
    v0 = Eigen::Vector2cd(off, Complex(lam0 - h00, 0.0));
    v0.normalize();
  }
  const Eigen::Vector2cd v1(-std::conj(v0(1)), std::conj(v0(0)));
  out.y.col(0) = v0;
  out.y.col(1) = v1;
  // columns of X follow from a v_i = s_i x_i
  Eigen::Vector2cd x0 = a * v0;
  Eigen::Vector2cd x1 = a * v1;
  if (out.s0 > 0) x0 /= out.s0;
  if (out.s1 > 0) x1 /= out.s1;
  out.x.col(0) = x0;
  out.x.col(1) = x1;
  return out;
}

}  // namespace detail

// Polar factor X Y^dag of a = X Sigma Y^dag: the unitary maximizing
// Re Tr(U^dag a). Singular values at or below 1e-14 signal an effectively
// disconnected slot and are rejected.
inline ComplexMatrix closest_unitary(const ComplexMatrix& a) {
  if (a.rows() != a.cols())
    throw std::invalid_argument("closest_unitary: matrix must be square");
  constexpr double kRankTol = 1e-14;
  if (a.rows() == 2) {
    const detail::Svd2x2 svd = detail::svd_2x2(a);
    if (svd.s1 <= kRankTol)
      throw DegenerateEnvironmentError(
          "closest_unitary: rank-deficient input (singular value " +
          std::to_string(svd.s1) + ")");
    return svd.x * svd.y.adjoint();
  }
  Eigen::JacobiSVD<ComplexMatrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (svd.singularValues().minCoeff() <= kRankTol)
    throw DegenerateEnvironmentError(
        "closest_unitary: rank-deficient input (singular value " +
        std::to_string(svd.singularValues().minCoeff()) + ")");
  return svd.matrixU() * svd.matrixV().adjoint();
}

// Trace out every qubit except `qubit`: A[p][q] = sum_r m[(p,r)][(q,r)], so
// that Tr((G (x) I_rest)^dag m) = Tr(G^dag A) for every 2x2 G.
inline ComplexMatrix partial_trace_to_qubit(const ComplexMatrix& m, int qubit,
                                            int n_qubits) {
  if (qubit < 0 || qubit >= n_qubits)
    throw std::out_of_range("partial_trace_to_qubit: qubit index out of range");
  const Eigen::Index dim = Eigen::Index{1} << n_qubits;
  if (m.rows() != dim || m.cols() != dim)
    throw std::invalid_argument("partial_trace_to_qubit: dimension mismatch");
  const Eigen::Index low = Eigen::Index{1} << (n_qubits - 1 - qubit);
  const Eigen::Index rest = dim >> 1;
  ComplexMatrix a = ComplexMatrix::Zero(2, 2);
  for (Eigen::Index r = 0; r < rest; ++r) {
    const Eigen::Index hi = r / low;
    const Eigen::Index lo = r % low;
    const Eigen::Index i0 = hi * (low << 1) + lo;
    const Eigen::Index i1 = i0 + low;
    a(0, 0) += m(i0, i0);
    a(0, 1) += m(i0, i1);
    a(1, 0) += m(i1, i0);
    a(1, 1) += m(i1, i1);
  }
  return a;
}

// m <- embed(g, qubit) * m, touching only the two row blocks that differ in
// the qubit's bit. O(dim^2).
inline void apply_single_qubit_left(ComplexMatrix& m, const Eigen::Matrix2cd& g,
                                    int qubit, int n_qubits) {
  const Eigen::Index low = Eigen::Index{1} << (n_qubits - 1 - qubit);
  const Eigen::Index rest = (Eigen::Index{1} << n_qubits) >> 1;
  Eigen::RowVectorXcd tmp(m.cols());
  for (Eigen::Index r = 0; r < rest; ++r) {
    const Eigen::Index hi = r / low;
    const Eigen::Index lo = r % low;
    const Eigen::Index i0 = hi * (low << 1) + lo;
    const Eigen::Index i1 = i0 + low;
    tmp = g(0, 0) * m.row(i0) + g(0, 1) * m.row(i1);
    m.row(i1) = g(1, 0) * m.row(i0) + g(1, 1) * m.row(i1);
    m.row(i0) = tmp;
  }
}

// m <- m * embed(g, qubit)
inline void apply_single_qubit_right(ComplexMatrix& m, const Eigen::Matrix2cd& g,
                                     int qubit, int n_qubits) {
  const Eigen::Index low = Eigen::Index{1} << (n_qubits - 1 - qubit);
  const Eigen::Index rest = (Eigen::Index{1} << n_qubits) >> 1;
  Eigen::VectorXcd tmp(m.rows());
  for (Eigen::Index r = 0; r < rest; ++r) {
    const Eigen::Index hi = r / low;
    const Eigen::Index lo = r % low;
    const Eigen::Index j0 = hi * (low << 1) + lo;
    const Eigen::Index j1 = j0 + low;
    tmp = m.col(j0) * g(0, 0) + m.col(j1) * g(1, 0);
    m.col(j1) = m.col(j0) * g(0, 1) + m.col(j1) * g(1, 1);
    m.col(j0) = tmp;
  }
}

}  // namespace qsynth
