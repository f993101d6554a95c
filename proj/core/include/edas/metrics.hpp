#ifndef EDAS_METRICS_HPP
#define EDAS_METRICS_HPP

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "edas/bdecomp.hpp"
#include "edas/mixing.hpp"
#include "edas/problems.hpp"

namespace edas {

// Iterate matrices follow the convention row i = agent i's point.

// (1/n) sum_i ||x_i - x_star||^2.
double distributed_mse(const Eigen::MatrixXd& x, const Eigen::VectorXd& x_star);
// (1/n) sum_i ||x_i - mean||^2.
double consensus_error(const Eigen::MatrixXd& x);
// ||mean - x_star||^2.
double mean_error_sq(const Eigen::MatrixXd& x, const Eigen::VectorXd& x_star);

// Moving dual target y*_k = -Vpinv (alpha W grad_F(x_star)); row i = agent i.
Eigen::MatrixXd dual_target(const SpectralMixing& spec,
                            const Eigen::MatrixXd& grad_f_star, double alpha);

// Coordinates of the primal-dual error (x - ones x_star^T, y - y_star) in the
// eigenbasis of the doubled operator: the two averaged components and the
// 2n-2 contracting ones.
struct TransformedCoords {
  Eigen::VectorXd zbar;      // (1/n) ones^T x_tilde        (length p)
  Eigen::VectorXd zhat;      // (1/n) ones^T y_tilde        (length p)
  Eigen::MatrixXcd zcheck;   // [ul_left, ul_right] (x_tilde; y_tilde), (2n-2) x p
};

TransformedCoords transformed_coords(const Eigen::MatrixXd& x,
                                     const Eigen::MatrixXd& y,
                                     const Eigen::VectorXd& x_star,
                                     const Eigen::MatrixXd& y_star,
                                     const BDecomposition& bd);

// Inverse change of basis; imaginary parts cancel up to roundoff.
Eigen::MatrixXd reconstruct_x_tilde(const TransformedCoords& tc,
                                    const BDecomposition& bd);
Eigen::MatrixXd reconstruct_y_tilde(const TransformedCoords& tc,
                                    const BDecomposition& bd);

// First k > 100 with distributed[k] <= factor * centralized[k], on
// replica-averaged curves of equal length; nullopt when never reached.
std::optional<long> transient_time(const std::vector<double>& distributed,
                                   const std::vector<double>& centralized,
                                   double factor = 2.0);

// Constants of the convergence analysis for stepsize theta / (mu (k + m)).
// Norm factors norm_ul / norm_ur are measured at c = 1; the balancing c
// appears explicitly where the formulas need it.
struct TheoreticalConstants {
  int n = 0;
  double theta = 0.0, m = 0.0;
  double mu = 0.0, lipschitz = 0.0, sigma_bar_sq = 0.0;
  double lambda2 = 0.0, sqrt_lambda2 = 0.0, lambda_n = 0.0, gap = 0.0;
  double vpinv_norm = 0.0;
  double grad_star_norm_sq = 0.0;
  double norm_ul = 0.0, norm_ur = 0.0, c = 0.0;
  // Offset floor: max of the mixing and the curvature requirement.
  double m_min_mixing = 0.0, m_min_function = 0.0, m_min = 0.0;
  double omega0 = 0.0;                  // weight coupling T into H at k = 0
  double p2 = 0.0, p3 = 0.0, p5 = 0.0;  // averaged-error noise/bias terms
  double q0 = 0.0;                      // contraction factor (3 + sqrt(l2))/4
  double q2 = 0.0, q3 = 0.0, q4 = 0.0;  // deviation-error terms
  double c0 = 0.0;                      // gradient-heterogeneity coupling
  double h0 = 0.0;                      // initial combined error M0 + omega0 T0
  double h_hat1 = 0.0, h_hat2 = 0.0;    // 1/k and 1/k^2 envelope coefficients
  double asymptotic_coefficient = 0.0;    // leading MSE coefficient
  double centralized_coefficient = 0.0;   // same for single-machine SGD
  double centralized_m_min = 0.0;         // ceil(theta L / mu)
  std::vector<std::string> warnings;
};

TheoreticalConstants theoretical_constants(const SpectralMixing& spec,
                                           const ProblemInstance& problem,
                                           double theta, double m,
                                           const Eigen::MatrixXd& x0);

// omega_k for the combined error H_k = M_k + omega_k T_k.
double omega_k(const TheoreticalConstants& tc, long k);

// Transient-time prediction: iterations until the distributed rate matches
// the centralized one, as the max of four regime terms.  `headline` is the
// consensus term n / (1 - lambda2) that dominates on slow-mixing graphs.
struct TransientBound {
  double term_consensus = 0.0;
  double term_gradient = 0.0;
  double term_init = 0.0;
  double term_log = 0.0;
  double dominant = 0.0;
  double headline = 0.0;
};

TransientBound transient_bound(const SpectralMixing& spec,
                               const ProblemInstance& problem,
                               const Eigen::MatrixXd& x0);

// Reference decay curves A / (k + m): the distributed asymptote
// 4 theta^2 sigma_bar^2 / ((3 theta - 2) n mu^2) and the centralized one
// theta^2 sigma_bar^2 / ((2 theta - 1) n mu^2), for k = 0..count-1.
struct RateCurves {
  double asymptotic_coefficient = 0.0;
  double centralized_coefficient = 0.0;
  std::vector<double> asymptotic;
  std::vector<double> centralized;
  std::vector<std::string> warnings;
};

RateCurves reference_rate_curves(double theta, double m, double sigma_bar_sq,
                                 double mu, int n, long count);

}  // namespace edas

#endif  // EDAS_METRICS_HPP
