#ifndef EDAS_MIXING_HPP
#define EDAS_MIXING_HPP

#include <Eigen/Dense>

#include "edas/graph.hpp"

namespace edas {

// Lazy Metropolis weights: W_ij = 1 / (2 max(deg_i, deg_j)) on edges, the
// diagonal absorbs the remainder (so W_ii >= 1/2).  Symmetric, doubly
// stochastic; requires a connected graph.
Eigen::MatrixXd lazy_metropolis(const Graph& graph);

// W' = beta I + (1 - beta) W with beta in (1/2, 1): keeps row sums and
// symmetry, shifts the spectrum so the smallest eigenvalue is
// at least 2 beta - 1 > 0.
Eigen::MatrixXd beta_shift(const Eigen::MatrixXd& w, double beta);

// Eigendecomposition of a symmetric doubly stochastic mixing matrix plus the
// derived square-root factors used by the primal-dual recursion.
//
//   W = Q diag(lambdas) Q^T,  eigenvalues sorted descending, lambdas[0] = 1,
//   first eigenvector = ones/sqrt(n) stored sign-positive,
//   V = (I - W)^{1/2},  Vpinv = Moore-Penrose pseudoinverse of V.
struct SpectralMixing {
  Eigen::MatrixXd w;
  Eigen::MatrixXd q;        // orthogonal, columns are eigenvectors
  Eigen::VectorXd lambdas;  // descending
  Eigen::MatrixXd v;
  Eigen::MatrixXd vpinv;

  int n() const { return static_cast<int>(lambdas.size()); }
  // Second largest / smallest eigenvalue; lambda2 is NaN when n == 1.
  double lambda2() const;
  double lambda_n() const { return lambdas(lambdas.size() - 1); }
  double gap() const { return 1.0 - lambda2(); }
  // ||Vpinv||_2 = 1 / sqrt(1 - lambda2); 0 when n == 1.
  double vpinv_norm() const;
};

// Factorize W.  Errors: non-symmetric or non-stochastic input (parameter
// error), eigensolver failure (numerical error), disconnected spectrum
// lambda2 >= 1 - 1e-12 (topology error).
SpectralMixing spectral(const Eigen::MatrixXd& w);

}  // namespace edas

#endif  // EDAS_MIXING_HPP
