#ifndef EDAS_PROBLEMS_HPP
#define EDAS_PROBLEMS_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "edas/mixing.hpp"
#include "edas/rng.hpp"

namespace edas {

enum class ProblemKind { kQuadratic, kLogistic };

// One agent's local dataset for the logistic objective: rows of `features`
// are the samples u_j, labels v_j in {-1, +1}.
struct LogisticShard {
  Eigen::MatrixXd features;
  Eigen::VectorXd labels;
};

// A finite-sum problem distributed over n agents: f = (1/n) sum_i f_i with
// common minimizer data precomputed (x_star, per-agent gradients there) and
// the regularity constants mu (strong convexity), L (gradient Lipschitz) and
// sigma_sq (per-agent gradient-noise second-moment bounds).
class ProblemInstance {
 public:
  ProblemKind kind() const { return kind_; }
  int num_agents() const { return num_agents_; }
  int dim() const { return dim_; }
  double mu() const { return mu_; }
  double lipschitz() const { return lipschitz_; }
  const Eigen::VectorXd& sigma_sq() const { return sigma_sq_; }
  // sigma_bar^2 = (1/n) sum_i sigma_i^2.
  double sigma_bar_sq() const { return sigma_sq_.mean(); }
  const Eigen::VectorXd& x_star() const { return x_star_; }
  // Row i = grad f_i(x_star); the rows sum to zero.
  const Eigen::MatrixXd& grad_f_star() const { return grad_f_star_; }
  double grad_f_star_norm() const { return grad_f_star_.norm(); }

  double objective(const Eigen::VectorXd& x) const;
  Eigen::VectorXd exact_gradient(int agent, const Eigen::VectorXd& x) const;
  // Unbiased noisy gradient; all randomness comes from `stream`, so a call is
  // a pure function of (instance, agent, x, stream address).
  Eigen::VectorXd stochastic_gradient(int agent, const Eigen::VectorXd& x,
                                      RngStream& stream) const;
  // In-place variants for the inner run loop (no per-call allocation).
  void exact_gradient_into(int agent, const Eigen::VectorXd& x,
                           Eigen::VectorXd& out) const;
  void stochastic_gradient_into(int agent, const Eigen::VectorXd& x,
                                RngStream& stream, Eigen::VectorXd& out) const;

  // Quadratic payload accessors (targets row i = d_i).
  const Eigen::MatrixXd& targets() const { return targets_; }
  double noise_sigma() const { return noise_sigma_; }
  // Logistic payload accessors.
  const std::vector<LogisticShard>& shards() const { return shards_; }
  double rho() const { return rho_; }
  int minibatch() const { return minibatch_; }

  friend ProblemInstance quadratic_problem(const SpectralMixing& spec, int dim,
                                           double noise_sigma);
  friend ProblemInstance logistic_problem(std::vector<LogisticShard> shards,
                                          double rho, int minibatch,
                                          double x_star_tol,
                                          long x_star_budget);

 private:
  ProblemInstance() = default;

  ProblemKind kind_ = ProblemKind::kQuadratic;
  int num_agents_ = 0;
  int dim_ = 0;
  double mu_ = 0.0;
  double lipschitz_ = 0.0;
  Eigen::VectorXd sigma_sq_;
  Eigen::VectorXd x_star_;
  Eigen::MatrixXd grad_f_star_;

  Eigen::MatrixXd targets_;
  double noise_sigma_ = 0.0;

  std::vector<LogisticShard> shards_;
  double rho_ = 0.0;
  int minibatch_ = 1;
};

// Agent i (1-indexed) pulls toward d_i = a_i sqrt(i) * ones, where a_i is the
// i-th smallest eigenvalue of W:  f_i(x) = (sqrt(n)/2) ||x - d_i||^2, so
// mu = L = sqrt(n) and x_star is the mean target.  The stochastic oracle adds
// N(0, noise_sigma^2 I) to the exact gradient.
ProblemInstance quadratic_problem(const SpectralMixing& spec, int dim = 1,
                                  double noise_sigma = 0.1);

// f_i(x) = (1/|S_i|) sum_j log(1 + exp(-x'u_j v_j)) + (rho/2)||x||^2.
// mu = rho, L = rho + max_j ||u_j||^2 / 4.  x_star is found by full-batch
// gradient descent with step 1/L down to gradient norm x_star_tol (numerical
// error if the iteration budget is exhausted).  The stochastic oracle averages
// `minibatch` samples drawn uniformly with replacement from the agent's shard.
ProblemInstance logistic_problem(std::vector<LogisticShard> shards,
                                 double rho = 1.0, int minibatch = 1,
                                 double x_star_tol = 1e-10,
                                 long x_star_budget = 500000);

// Synthetic logistic data (dim >= 2): features are iid standard normal, labels
// follow a logistic model with a hidden weight vector; everything is a pure
// function of `data_seed`.
std::vector<LogisticShard> synthetic_logistic_data(int num_agents,
                                                   int samples_per_agent,
                                                   int dim,
                                                   std::uint64_t data_seed);

}  // namespace edas

#endif  // EDAS_PROBLEMS_HPP
