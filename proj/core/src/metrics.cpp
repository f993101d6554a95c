#include "edas/metrics.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "edas/errors.hpp"

namespace edas {

double distributed_mse(const Eigen::MatrixXd& x, const Eigen::VectorXd& x_star) {
  return (x.rowwise() - x_star.transpose()).squaredNorm() /
         static_cast<double>(x.rows());
}

double consensus_error(const Eigen::MatrixXd& x) {
  const Eigen::RowVectorXd mean = x.colwise().mean();
  return (x.rowwise() - mean).squaredNorm() / static_cast<double>(x.rows());
}

double mean_error_sq(const Eigen::MatrixXd& x, const Eigen::VectorXd& x_star) {
  return (x.colwise().mean().transpose() - x_star).squaredNorm();
}

Eigen::MatrixXd dual_target(const SpectralMixing& spec,
                            const Eigen::MatrixXd& grad_f_star, double alpha) {
  return -spec.vpinv * (alpha * spec.w * grad_f_star);
}

TransformedCoords transformed_coords(const Eigen::MatrixXd& x,
                                     const Eigen::MatrixXd& y,
                                     const Eigen::VectorXd& x_star,
                                     const Eigen::MatrixXd& y_star,
                                     const BDecomposition& bd) {
  const auto n = x.rows();
  if (y.rows() != n || x.cols() != y.cols() || y_star.rows() != n ||
      y_star.cols() != x.cols() || x_star.size() != x.cols() || n != bd.n()) {
    throw std::invalid_argument("transformed_coords: shape mismatch");
  }
  const Eigen::MatrixXd x_tilde = x.rowwise() - x_star.transpose();
  const Eigen::MatrixXd y_tilde = y - y_star;
  TransformedCoords tc;
  tc.zbar = x_tilde.colwise().mean().transpose();
  tc.zhat = y_tilde.colwise().mean().transpose();
  tc.zcheck = bd.ul_left * x_tilde.cast<std::complex<double>>() +
              bd.ul_right * y_tilde.cast<std::complex<double>>();
  return tc;
}

Eigen::MatrixXd reconstruct_x_tilde(const TransformedCoords& tc,
                                    const BDecomposition& bd) {
  const int n = bd.n();
  Eigen::MatrixXd out = Eigen::VectorXd::Ones(n) * tc.zbar.transpose();
  out += (bd.ur_upper * tc.zcheck).real();
  return out;
}

Eigen::MatrixXd reconstruct_y_tilde(const TransformedCoords& tc,
                                    const BDecomposition& bd) {
  const int n = bd.n();
  Eigen::MatrixXd out = Eigen::VectorXd::Ones(n) * tc.zhat.transpose();
  out += (bd.ur_lower * tc.zcheck).real();
  return out;
}

std::optional<long> transient_time(const std::vector<double>& distributed,
                                   const std::vector<double>& centralized,
                                   double factor) {
  if (distributed.size() != centralized.size()) {
    throw std::invalid_argument(
        "transient_time: curves have different lengths (" +
        std::to_string(distributed.size()) + " vs " +
        std::to_string(centralized.size()) + ")");
  }
  for (std::size_t k = 101; k < distributed.size(); ++k) {
    if (distributed[k] <= factor * centralized[k]) {
      return static_cast<long>(k);
    }
  }
  return std::nullopt;
}

TheoreticalConstants theoretical_constants(const SpectralMixing& spec,
                                           const ProblemInstance& problem,
                                           double theta, double m,
                                           const Eigen::MatrixXd& x0) {
  if (theta <= 3.0) {
    throw ParameterError("theoretical_constants: theta must exceed 3, got " +
                         std::to_string(theta));
  }
  if (!(m > 0.0)) {
    throw ParameterError("theoretical_constants: m must be positive");
  }
  if (x0.rows() != spec.n() || x0.cols() != problem.dim()) {
    throw ParameterError("theoretical_constants: x0 must be n x dim");
  }

  const BDecomposition base = b_decomposition(spec, 1.0);

  TheoreticalConstants tc;
  tc.n = spec.n();
  tc.theta = theta;
  tc.m = m;
  tc.mu = problem.mu();
  tc.lipschitz = problem.lipschitz();
  tc.sigma_bar_sq = problem.sigma_bar_sq();
  tc.lambda2 = spec.lambda2();
  tc.sqrt_lambda2 = std::sqrt(tc.lambda2);
  tc.lambda_n = spec.lambda_n();
  tc.gap = spec.gap();
  tc.vpinv_norm = spec.vpinv_norm();
  tc.grad_star_norm_sq = problem.grad_f_star().squaredNorm();
  tc.norm_ul = base.norm_ul;
  tc.norm_ur = base.norm_ur;
  tc.c = std::sqrt(static_cast<double>(tc.n)) * base.norm_ul;

  const double n = tc.n;
  const double mu2 = tc.mu * tc.mu;
  const double l2 = tc.lipschitz * tc.lipschitz;
  const double one_minus_root = 1.0 - tc.sqrt_lambda2;
  const double ul2 = tc.norm_ul * tc.norm_ul;
  const double ur2 = tc.norm_ur * tc.norm_ur;
  const double c2 = tc.c * tc.c;

  tc.m_min_mixing = 24.0 * theta / one_minus_root;
  tc.m_min_function =
      24.0 * theta * l2 * tc.norm_ur * tc.norm_ul / (mu2 * one_minus_root);
  tc.m_min = std::max(tc.m_min_mixing, tc.m_min_function);

  tc.p2 = theta * theta * tc.sigma_bar_sq / (n * mu2);
  tc.p3 = 24.0 * tc.lambda2 * std::pow(theta, 3) * tc.sigma_bar_sq * ul2 * ur2 *
          l2 / (mu2 * mu2 * one_minus_root);
  tc.p5 = 96.0 * std::pow(theta, 3) * ul2 * ur2 * l2 * tc.vpinv_norm *
          tc.vpinv_norm * tc.grad_star_norm_sq /
          (n * mu2 * mu2 * one_minus_root * one_minus_root);

  tc.q0 = (3.0 + tc.sqrt_lambda2) / 4.0;
  tc.q2 = tc.lambda2 * n * ul2 * tc.sigma_bar_sq * theta * theta / (c2 * mu2);

  tc.h_hat1 = (tc.p2 + tc.p5 / std::pow(m, 3)) / (theta - 3.0);

  // Initial combined error H0 = M0 + omega_0 T0 for X0 and Y0 = 0.
  const BDecomposition scaled = b_decomposition(spec, tc.c);
  const double alpha0 = theta / (tc.mu * m);
  const Eigen::MatrixXd y_star0 = dual_target(spec, problem.grad_f_star(), alpha0);
  const Eigen::MatrixXd y0 = Eigen::MatrixXd::Zero(tc.n, problem.dim());
  const TransformedCoords coords =
      transformed_coords(x0, y0, problem.x_star(), y_star0, scaled);
  const double m0 = coords.zbar.squaredNorm();
  const double t0 = coords.zcheck.squaredNorm();
  tc.omega0 = 24.0 * alpha0 * c2 * ur2 * l2 / (n * tc.mu * one_minus_root);
  tc.h0 = m0 + tc.omega0 * t0;

  tc.h_hat2 = m * m * tc.h0 + 2.0 * tc.p3 / (2.0 * theta - 3.0);

  tc.q3 = 4.0 * tc.lambda2 * n * ul2 * theta * theta * l2 * tc.h_hat1 /
          (mu2 * c2 * (1.0 - tc.lambda2));
  tc.q4 = 4.0 * tc.lambda2 * n * ul2 * theta * theta * l2 * tc.h_hat2 /
              (mu2 * c2 * (1.0 - tc.lambda2)) +
          4.0 * ul2 * tc.vpinv_norm * tc.vpinv_norm * tc.grad_star_norm_sq *
              theta * theta / (mu2 * c2 * one_minus_root);
  tc.c0 = 3.0 * theta * l2 * c2 * ur2 / (n * mu2);

  tc.asymptotic_coefficient =
      4.0 * theta * theta * tc.sigma_bar_sq / ((3.0 * theta - 2.0) * n * mu2);
  tc.centralized_coefficient =
      theta * theta * tc.sigma_bar_sq / ((2.0 * theta - 1.0) * n * mu2);
  tc.centralized_m_min = std::ceil(theta * tc.lipschitz / tc.mu);

  if (theta < 4.0) {
    tc.warnings.push_back("theta below 4: outside the contraction analysis");
  }
  if (theta <= 5.0) {
    tc.warnings.push_back("theta not above 5: rate guarantees need theta > 5");
  }
  if (m < tc.m_min) {
    tc.warnings.push_back("m below m_min = " + std::to_string(tc.m_min));
  }
  return tc;
}

double omega_k(const TheoreticalConstants& tc, long k) {
  const double alpha = tc.theta / (tc.mu * (static_cast<double>(k) + tc.m));
  return 24.0 * alpha * tc.c * tc.c * tc.norm_ur * tc.norm_ur * tc.lipschitz *
         tc.lipschitz / (tc.n * tc.mu * (1.0 - tc.sqrt_lambda2));
}

TransientBound transient_bound(const SpectralMixing& spec,
                               const ProblemInstance& problem,
                               const Eigen::MatrixXd& x0) {
  if (x0.rows() != spec.n() || x0.cols() != problem.dim()) {
    throw ParameterError("transient_bound: x0 must be n x dim");
  }
  const double gap = spec.gap();
  const double grad_sq = problem.grad_f_star().squaredNorm();
  const double init_sq =
      (x0.rowwise() - problem.x_star().transpose()).squaredNorm();

  TransientBound tb;
  tb.term_consensus = static_cast<double>(spec.n()) / gap;
  tb.term_gradient = std::cbrt(grad_sq / std::pow(gap, 3));
  tb.term_init = std::pow(init_sq / std::pow(gap, 6), 0.2);
  const double log_arg = init_sq + grad_sq;
  const double log_term = log_arg > 0.0
                              ? std::log(log_arg)
                              : -std::numeric_limits<double>::infinity();
  tb.term_log = std::max(log_term, -std::log(gap)) / gap;
  tb.dominant = std::max({tb.term_consensus, tb.term_gradient, tb.term_init,
                          tb.term_log});
  tb.headline = tb.term_consensus;
  return tb;
}

RateCurves reference_rate_curves(double theta, double m, double sigma_bar_sq,
                                 double mu, int n, long count) {
  if (theta <= 2.0 / 3.0) {
    throw ParameterError(
        "reference_rate_curves: theta must exceed 2/3, got " +
        std::to_string(theta));
  }
  if (!(m > 0.0) || !(mu > 0.0) || n < 1 || count < 0 || sigma_bar_sq < 0.0) {
    throw ParameterError("reference_rate_curves: invalid inputs");
  }
  RateCurves rc;
  rc.asymptotic_coefficient =
      4.0 * theta * theta * sigma_bar_sq / ((3.0 * theta - 2.0) * n * mu * mu);
  rc.centralized_coefficient =
      theta * theta * sigma_bar_sq / ((2.0 * theta - 1.0) * n * mu * mu);
  rc.asymptotic.resize(static_cast<std::size_t>(count));
  rc.centralized.resize(static_cast<std::size_t>(count));
  for (long k = 0; k < count; ++k) {
    const double denom = static_cast<double>(k) + m;
    rc.asymptotic[static_cast<std::size_t>(k)] =
        rc.asymptotic_coefficient / denom;
    rc.centralized[static_cast<std::size_t>(k)] =
        rc.centralized_coefficient / denom;
  }
  if (theta <= 5.0) {
    rc.warnings.push_back("theta not above 5: rate guarantees need theta > 5");
  }
  return rc;
}

}  // namespace edas
