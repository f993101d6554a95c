#ifndef EDAS_BDECOMP_HPP
#define EDAS_BDECOMP_HPP

#include <Eigen/Dense>

#include "edas/mixing.hpp"

namespace edas {

// Linear part of the primal-dual recursion written as one 2n x 2n operator:
//
//   B = [ W    -V ]
//       [ V W   W ]
//
// B has eigenvalue 1 twice (eigenvectors (ones; 0) and (0; ones)) and, for
// every remaining eigenvalue lambda of W, the conjugate pair
// lambda +- i sqrt(lambda - lambda^2).  The decomposition below carries the
// non-unit part:
//
//   B = U diag(1, 1, d1) U^{-1},
//   U = [ ones  0     ur_upper ]       U^{-1} = [ ones^T/n   0        ]
//       [ 0     ones  ur_lower ],               [ 0          ones^T/n ]
//                                               [ ul_left    ul_right ]
//
// A free scaling constant c > 0 is folded into the stored blocks: ur_* carry a
// factor c and ul_* a factor 1/c, so reassembling U from the stored blocks
// needs no extra scaling.  Requires every eigenvalue of W to be positive
// (use beta_shift when the raw weights touch zero).
struct BDecomposition {
  double c = 1.0;
  Eigen::VectorXcd d1;                    // 2n-2 non-unit eigenvalues of B
  Eigen::MatrixXcd ur_upper, ur_lower;    // n x (2n-2), scaled by c
  Eigen::MatrixXcd ul_left, ul_right;     // (2n-2) x n, scaled by 1/c
  double norm_ur = 0.0;                   // ||[ur_upper; ur_lower]||_2
  double norm_ul = 0.0;                   // ||[ul_left, ul_right]||_2
  double max_abs_d1 = 0.0;                // = sqrt(lambda2)

  int n() const { return static_cast<int>(ur_upper.rows()); }
};

BDecomposition b_decomposition(const SpectralMixing& spec, double c = 1.0);

// Scaling that balances the two block norms: c = sqrt(n) * ||U_L|| measured
// at c = 1.
double choose_c(const SpectralMixing& spec);

// Dense helpers, mainly for cross-checks: the operator itself, the assembled
// 2n x 2n eigenbasis, its inverse, and the full eigenvalue vector (1, 1, d1).
Eigen::MatrixXd b_matrix(const SpectralMixing& spec);
Eigen::MatrixXcd assemble_u(const BDecomposition& bd);
Eigen::MatrixXcd assemble_u_inverse(const BDecomposition& bd);
Eigen::VectorXcd full_b_eigenvalues(const BDecomposition& bd);

}  // namespace edas

#endif  // EDAS_BDECOMP_HPP
