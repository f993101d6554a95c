#include "edas/mixing.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "edas/errors.hpp"

namespace edas {

Eigen::MatrixXd lazy_metropolis(const Graph& graph) {
  const auto report = validate(graph);
  if (!report.connected) {
    std::string nodes;
    for (int v : report.unreachable) {
      if (!nodes.empty()) nodes += ", ";
      nodes += std::to_string(v);
    }
    throw TopologyError("lazy_metropolis requires a connected graph; "
                        "unreachable from node 0: {" + nodes + "}");
  }
  const int n = graph.num_nodes();
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(n, n);
  for (auto [a, b] : graph.edges()) {
    const double wij = 1.0 / (2.0 * std::max(graph.degree(a), graph.degree(b)));
    w(a, b) = wij;
    w(b, a) = wij;
  }
  for (int i = 0; i < n; ++i) {
    w(i, i) = 1.0 - w.row(i).sum();
  }
  return w;
}

Eigen::MatrixXd beta_shift(const Eigen::MatrixXd& w, double beta) {
  if (!(beta > 0.5 && beta < 1.0)) {
    throw ParameterError("beta_shift requires beta in (1/2, 1), got " +
                         std::to_string(beta));
  }
  const auto n = w.rows();
  return beta * Eigen::MatrixXd::Identity(n, n) + (1.0 - beta) * w;
}

double SpectralMixing::lambda2() const {
  if (lambdas.size() < 2) return std::numeric_limits<double>::quiet_NaN();
  return lambdas(1);
}

double SpectralMixing::vpinv_norm() const {
  if (lambdas.size() < 2) return 0.0;
  return 1.0 / std::sqrt(1.0 - lambdas(1));
}

SpectralMixing spectral(const Eigen::MatrixXd& w) {
  const auto n = w.rows();
  if (n < 1 || w.cols() != n) {
    throw ParameterError("spectral: matrix must be square and non-empty");
  }
  if ((w - w.transpose()).cwiseAbs().maxCoeff() > 1e-12) {
    throw ParameterError("spectral: mixing matrix must be symmetric");
  }
  if ((w.rowwise().sum().array() - 1.0).abs().maxCoeff() > 1e-10) {
    throw ParameterError("spectral: mixing matrix rows must sum to 1");
  }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(w);
  if (solver.info() != Eigen::Success) {
    throw NumericalError("spectral: eigensolver failed to converge");
  }

  SpectralMixing spec;
  spec.w = w;
  spec.lambdas = solver.eigenvalues().reverse();  // descending
  spec.q = solver.eigenvectors().rowwise().reverse();

  // Deterministic sign convention: the largest-magnitude entry of each
  // eigenvector (first such index on ties) is made positive.  This puts the
  // first column at +ones/sqrt(n).
  for (Eigen::Index j = 0; j < n; ++j) {
    Eigen::Index imax = 0;
    spec.q.col(j).cwiseAbs().maxCoeff(&imax);
    if (spec.q(imax, j) < 0.0) spec.q.col(j) = -spec.q.col(j);
  }

  if (std::abs(spec.lambdas(0) - 1.0) > 1e-8) {
    throw ParameterError("spectral: leading eigenvalue is " +
                         std::to_string(spec.lambdas(0)) +
                         ", matrix is not doubly stochastic");
  }
  if (n >= 2 && spec.lambdas(1) >= 1.0 - 1e-12) {
    throw TopologyError("spectral: lambda2 = " +
                        std::to_string(spec.lambdas(1)) +
                        " indicates a disconnected mixing matrix");
  }

  // Residues 1 - lambda.  Residues below the consensus threshold are exactly
  // zero in exact arithmetic (the averaging modes), so they are zeroed here
  // rather than letting sqrt amplify eigensolver roundoff into V.
  Eigen::VectorXd residue = (1.0 - spec.lambdas.array()).matrix();
  for (Eigen::Index j = 0; j < n; ++j) {
    if (residue(j) < -1e-8) {
      throw ParameterError("spectral: eigenvalue exceeds 1 by " +
                           std::to_string(-residue(j)));
    }
    if (residue(j) <= 1e-10) residue(j) = 0.0;
  }

  Eigen::VectorXd sqrt_residue = residue.array().sqrt().matrix();
  spec.v = spec.q * sqrt_residue.asDiagonal() * spec.q.transpose();

  Eigen::VectorXd inv_sqrt = Eigen::VectorXd::Zero(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    if (residue(j) > 0.0) inv_sqrt(j) = 1.0 / sqrt_residue(j);
  }
  spec.vpinv = spec.q * inv_sqrt.asDiagonal() * spec.q.transpose();
  return spec;
}

}  // namespace edas
