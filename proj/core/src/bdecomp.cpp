#include "edas/bdecomp.hpp"

#include <cmath>
#include <complex>
#include <string>

#include "edas/errors.hpp"

namespace edas {

namespace {

// Spectral norm via the Hermitian Gram matrix (the smaller of A^H A / A A^H).
double spectral_norm(const Eigen::MatrixXcd& a) {
  Eigen::MatrixXcd gram;
  if (a.rows() >= a.cols()) {
    gram = a.adjoint() * a;
  } else {
    gram = a * a.adjoint();
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(gram);
  if (solver.info() != Eigen::Success) {
    throw NumericalError("spectral_norm: eigensolver failed to converge");
  }
  return std::sqrt(std::max(0.0, solver.eigenvalues().maxCoeff()));
}

}  // namespace

BDecomposition b_decomposition(const SpectralMixing& spec, double c) {
  if (!(c > 0.0) || !std::isfinite(c)) {
    throw ParameterError("b_decomposition: c must be positive and finite");
  }
  const int n = spec.n();
  if (n < 2) {
    throw ParameterError("b_decomposition requires n >= 2");
  }
  for (int j = 1; j < n; ++j) {
    if (spec.lambdas(j) <= 1e-8) {
      throw SpectrumError(
          "b_decomposition: eigenvalue " + std::to_string(spec.lambdas(j)) +
          " at position " + std::to_string(j + 1) +
          " is not positive; shift the weights (beta_shift) first");
    }
  }

  const std::complex<double> imag_unit(0.0, 1.0);
  BDecomposition bd;
  bd.c = c;
  bd.d1.resize(2 * n - 2);
  bd.ur_upper.resize(n, 2 * n - 2);
  bd.ur_lower.resize(n, 2 * n - 2);
  bd.ul_left.resize(2 * n - 2, n);
  bd.ul_right.resize(2 * n - 2, n);

  // Each non-unit eigenvalue lambda of W contributes the 2x2 block
  //   [ lambda          -sqrt(1-lambda) ]
  //   [ lambda sqrt(1-lambda)   lambda  ]
  // in the (q_j upper, q_j lower) plane; its eigenpairs are
  //   lambda +- i s,  s = sqrt(lambda - lambda^2),
  // with right eigenvectors (1, -+ i sqrt(lambda)) and left rows
  // (1/2, +- i / (2 sqrt(lambda))).
  for (int j = 1; j < n; ++j) {
    const double lambda = spec.lambdas(j);
    const double s = std::sqrt(std::max(0.0, lambda - lambda * lambda));
    const double root = std::sqrt(lambda);
    const Eigen::VectorXd qj = spec.q.col(j);
    const int col = 2 * (j - 1);

    bd.d1(col) = std::complex<double>(lambda, s);
    bd.d1(col + 1) = std::complex<double>(lambda, -s);

    bd.ur_upper.col(col) = (c * qj).cast<std::complex<double>>();
    bd.ur_upper.col(col + 1) = bd.ur_upper.col(col);
    bd.ur_lower.col(col) = (-imag_unit * c * root) * qj.cast<std::complex<double>>();
    bd.ur_lower.col(col + 1) = -bd.ur_lower.col(col);

    bd.ul_left.row(col) = (qj / (2.0 * c)).cast<std::complex<double>>().transpose();
    bd.ul_left.row(col + 1) = bd.ul_left.row(col);
    bd.ul_right.row(col) =
        (imag_unit / (2.0 * c * root)) * qj.cast<std::complex<double>>().transpose();
    bd.ul_right.row(col + 1) = -bd.ul_right.row(col);
  }

  Eigen::MatrixXcd ur(2 * n, 2 * n - 2);
  ur << bd.ur_upper, bd.ur_lower;
  Eigen::MatrixXcd ul(2 * n - 2, 2 * n);
  ul << bd.ul_left, bd.ul_right;
  bd.norm_ur = spectral_norm(ur);
  bd.norm_ul = spectral_norm(ul);
  bd.max_abs_d1 = std::sqrt(spec.lambdas(1));
  return bd;
}

double choose_c(const SpectralMixing& spec) {
  const BDecomposition base = b_decomposition(spec, 1.0);
  return std::sqrt(static_cast<double>(spec.n())) * base.norm_ul;
}

Eigen::MatrixXd b_matrix(const SpectralMixing& spec) {
  const int n = spec.n();
  Eigen::MatrixXd b(2 * n, 2 * n);
  b.topLeftCorner(n, n) = spec.w;
  b.topRightCorner(n, n) = -spec.v;
  b.bottomLeftCorner(n, n) = spec.v * spec.w;
  b.bottomRightCorner(n, n) = spec.w;
  return b;
}

Eigen::MatrixXcd assemble_u(const BDecomposition& bd) {
  const int n = bd.n();
  Eigen::MatrixXcd u = Eigen::MatrixXcd::Zero(2 * n, 2 * n);
  u.col(0).head(n).setOnes();
  u.col(1).tail(n).setOnes();
  u.block(0, 2, n, 2 * n - 2) = bd.ur_upper;
  u.block(n, 2, n, 2 * n - 2) = bd.ur_lower;
  return u;
}

Eigen::MatrixXcd assemble_u_inverse(const BDecomposition& bd) {
  const int n = bd.n();
  Eigen::MatrixXcd uinv = Eigen::MatrixXcd::Zero(2 * n, 2 * n);
  uinv.row(0).head(n).setConstant(1.0 / n);
  uinv.row(1).tail(n).setConstant(1.0 / n);
  uinv.block(2, 0, 2 * n - 2, n) = bd.ul_left;
  uinv.block(2, n, 2 * n - 2, n) = bd.ul_right;
  return uinv;
}

Eigen::VectorXcd full_b_eigenvalues(const BDecomposition& bd) {
  Eigen::VectorXcd d(bd.d1.size() + 2);
  d(0) = 1.0;
  d(1) = 1.0;
  d.tail(bd.d1.size()) = bd.d1;
  return d;
}

}  // namespace edas
