#include "edas/problems.hpp"

#include <cmath>
#include <string>

#include "edas/errors.hpp"

namespace edas {

namespace {

inline double sigmoid(double t) { return 1.0 / (1.0 + std::exp(-t)); }

// log(1 + exp(t)) without overflow for large t.
inline double log1p_exp(double t) {
  if (t > 0.0) return t + std::log1p(std::exp(-t));
  return std::log1p(std::exp(t));
}

}  // namespace

double ProblemInstance::objective(const Eigen::VectorXd& x) const {
  if (kind_ == ProblemKind::kQuadratic) {
    double sum = 0.0;
    for (int i = 0; i < num_agents_; ++i) {
      sum += 0.5 * std::sqrt(static_cast<double>(num_agents_)) *
             (x - targets_.row(i).transpose()).squaredNorm();
    }
    return sum / num_agents_;
  }
  double sum = 0.0;
  for (const auto& shard : shards_) {
    double local = 0.0;
    for (Eigen::Index j = 0; j < shard.labels.size(); ++j) {
      local += log1p_exp(-shard.labels(j) *
                         x.dot(shard.features.row(j).transpose()));
    }
    sum += local / static_cast<double>(shard.labels.size()) +
           0.5 * rho_ * x.squaredNorm();
  }
  return sum / num_agents_;
}

void ProblemInstance::exact_gradient_into(int agent, const Eigen::VectorXd& x,
                                          Eigen::VectorXd& out) const {
  if (agent < 0 || agent >= num_agents_) {
    throw ParameterError("exact_gradient: agent " + std::to_string(agent) +
                         " out of range");
  }
  if (x.size() != dim_) {
    throw ParameterError("exact_gradient: point has dimension " +
                         std::to_string(x.size()) + ", expected " +
                         std::to_string(dim_));
  }
  if (kind_ == ProblemKind::kQuadratic) {
    out = mu_ * (x - targets_.row(agent).transpose());
    return;
  }
  const auto& shard = shards_[agent];
  out.setZero(dim_);
  for (Eigen::Index j = 0; j < shard.labels.size(); ++j) {
    const double v = shard.labels(j);
    const double coeff = -v * sigmoid(-v * shard.features.row(j).dot(x));
    out.noalias() += coeff * shard.features.row(j).transpose();
  }
  out /= static_cast<double>(shard.labels.size());
  out.noalias() += rho_ * x;
}

Eigen::VectorXd ProblemInstance::exact_gradient(int agent,
                                                const Eigen::VectorXd& x) const {
  Eigen::VectorXd g;
  exact_gradient_into(agent, x, g);
  return g;
}

void ProblemInstance::stochastic_gradient_into(int agent,
                                               const Eigen::VectorXd& x,
                                               RngStream& stream,
                                               Eigen::VectorXd& out) const {
  if (kind_ == ProblemKind::kQuadratic) {
    exact_gradient_into(agent, x, out);
    if (noise_sigma_ > 0.0) {
      for (Eigen::Index d = 0; d < out.size(); ++d) {
        out(d) += noise_sigma_ * stream.next_gaussian();
      }
    }
    return;
  }
  if (agent < 0 || agent >= num_agents_) {
    throw ParameterError("stochastic_gradient: agent " + std::to_string(agent) +
                         " out of range");
  }
  if (x.size() != dim_) {
    throw ParameterError("stochastic_gradient: point has dimension " +
                         std::to_string(x.size()) + ", expected " +
                         std::to_string(dim_));
  }
  const auto& shard = shards_[agent];
  const auto count = static_cast<std::uint64_t>(shard.labels.size());
  out.setZero(dim_);
  for (int b = 0; b < minibatch_; ++b) {
    const auto j = static_cast<Eigen::Index>(stream.next_index(count));
    const double v = shard.labels(j);
    const double coeff = -v * sigmoid(-v * shard.features.row(j).dot(x));
    out.noalias() += coeff * shard.features.row(j).transpose();
  }
  out /= static_cast<double>(minibatch_);
  out.noalias() += rho_ * x;
}

Eigen::VectorXd ProblemInstance::stochastic_gradient(int agent,
                                                     const Eigen::VectorXd& x,
                                                     RngStream& stream) const {
  Eigen::VectorXd g;
  stochastic_gradient_into(agent, x, stream, g);
  return g;
}

ProblemInstance quadratic_problem(const SpectralMixing& spec, int dim,
                                  double noise_sigma) {
  if (dim < 1) {
    throw ParameterError("quadratic_problem: dim must be >= 1");
  }
  if (noise_sigma < 0.0) {
    throw ParameterError("quadratic_problem: noise_sigma must be >= 0");
  }
  const int n = spec.n();
  ProblemInstance inst;
  inst.kind_ = ProblemKind::kQuadratic;
  inst.num_agents_ = n;
  inst.dim_ = dim;
  inst.mu_ = std::sqrt(static_cast<double>(n));
  inst.lipschitz_ = inst.mu_;
  inst.noise_sigma_ = noise_sigma;
  inst.sigma_sq_ =
      Eigen::VectorXd::Constant(n, noise_sigma * noise_sigma * dim);

  // Agent i (1-indexed) gets target a_i sqrt(i) * ones with a_i the i-th
  // smallest eigenvalue of W — agents thus disagree more on better-connected
  // graphs' high end, and x_star depends on the whole spectrum.
  inst.targets_.resize(n, dim);
  for (int i = 0; i < n; ++i) {
    const double a = spec.lambdas(n - 1 - i);  // i-th smallest
    inst.targets_.row(i).setConstant(a * std::sqrt(static_cast<double>(i + 1)));
  }
  inst.x_star_ = inst.targets_.colwise().mean().transpose();
  inst.grad_f_star_.resize(n, dim);
  for (int i = 0; i < n; ++i) {
    inst.grad_f_star_.row(i) =
        inst.mu_ * (inst.x_star_.transpose() - inst.targets_.row(i));
  }
  return inst;
}

ProblemInstance logistic_problem(std::vector<LogisticShard> shards, double rho,
                                 int minibatch, double x_star_tol,
                                 long x_star_budget) {
  if (shards.empty()) {
    throw DataError("logistic_problem: no shards given");
  }
  if (rho <= 0.0) {
    throw ParameterError("logistic_problem: rho must be positive");
  }
  if (minibatch < 1) {
    throw ParameterError("logistic_problem: minibatch must be >= 1");
  }
  const auto dim = shards.front().features.cols();
  double max_feature_sq = 0.0;
  for (std::size_t i = 0; i < shards.size(); ++i) {
    const auto& shard = shards[i];
    if (shard.labels.size() == 0) {
      throw DataError("logistic_problem: shard " + std::to_string(i) +
                      " is empty");
    }
    if (shard.features.rows() != shard.labels.size() ||
        shard.features.cols() != dim) {
      throw DataError("logistic_problem: shard " + std::to_string(i) +
                      " has inconsistent shapes");
    }
    for (Eigen::Index j = 0; j < shard.labels.size(); ++j) {
      if (std::abs(shard.labels(j)) != 1.0) {
        throw DataError("logistic_problem: shard " + std::to_string(i) +
                        " label " + std::to_string(j) + " is not +-1");
      }
      max_feature_sq =
          std::max(max_feature_sq, shard.features.row(j).squaredNorm());
    }
  }

  const int n = static_cast<int>(shards.size());
  ProblemInstance inst;
  inst.kind_ = ProblemKind::kLogistic;
  inst.num_agents_ = n;
  inst.dim_ = static_cast<int>(dim);
  inst.rho_ = rho;
  inst.minibatch_ = minibatch;
  inst.mu_ = rho;
  inst.lipschitz_ = rho + max_feature_sq / 4.0;
  inst.shards_ = std::move(shards);

  // Deterministic variance bound: the data term of a one-sample gradient has
  // norm at most ||u_j||, so (1/|S_i|) sum_j ||u_j||^2 bounds the deviation
  // second moment uniformly in x (the regularizer cancels in the deviation).
  inst.sigma_sq_.resize(n);
  for (int i = 0; i < n; ++i) {
    inst.sigma_sq_(i) = inst.shards_[i].features.rowwise().squaredNorm().mean() /
                        static_cast<double>(minibatch);
  }

  // Full-batch gradient descent for x_star; linear rate with step 1/L.
  Eigen::VectorXd x = Eigen::VectorXd::Zero(dim);
  const double step = 1.0 / inst.lipschitz_;
  double grad_norm = 0.0;
  bool converged = false;
  for (long it = 0; it < x_star_budget; ++it) {
    Eigen::VectorXd g = Eigen::VectorXd::Zero(dim);
    for (int i = 0; i < n; ++i) g += inst.exact_gradient(i, x);
    g /= static_cast<double>(n);
    grad_norm = g.norm();
    if (grad_norm <= x_star_tol) {
      converged = true;
      break;
    }
    x -= step * g;
  }
  if (!converged) {
    throw NumericalError(
        "logistic_problem: x_star solver exhausted its budget of " +
        std::to_string(x_star_budget) + " iterations (gradient norm " +
        std::to_string(grad_norm) + ", tol " + std::to_string(x_star_tol) + ")");
  }
  inst.x_star_ = x;
  inst.grad_f_star_.resize(n, dim);
  for (int i = 0; i < n; ++i) {
    inst.grad_f_star_.row(i) = inst.exact_gradient(i, x).transpose();
  }
  return inst;
}

std::vector<LogisticShard> synthetic_logistic_data(int num_agents,
                                                   int samples_per_agent,
                                                   int dim,
                                                   std::uint64_t data_seed) {
  if (dim < 2) {
    throw ParameterError("synthetic_logistic_data: dim must be >= 2");
  }
  if (num_agents < 1 || samples_per_agent < 1) {
    throw ParameterError(
        "synthetic_logistic_data: need at least one agent and one sample");
  }
  // Hidden weights live in their own stream so the data for agent i / sample s
  // never depends on how many agents were generated.
  Eigen::VectorXd w_true(dim);
  {
    RngStream stream(data_seed, rng_domain::kData, 0, 0xFFFFFFFFu, 0);
    for (int d = 0; d < dim; ++d) {
      w_true(d) = stream.next_gaussian() / std::sqrt(static_cast<double>(dim));
    }
  }
  std::vector<LogisticShard> shards(num_agents);
  for (int i = 0; i < num_agents; ++i) {
    auto& shard = shards[i];
    shard.features.resize(samples_per_agent, dim);
    shard.labels.resize(samples_per_agent);
    for (int s = 0; s < samples_per_agent; ++s) {
      RngStream stream(data_seed, rng_domain::kData, 0,
                       static_cast<std::uint32_t>(i),
                       static_cast<std::uint32_t>(s));
      for (int d = 0; d < dim; ++d) shard.features(s, d) = stream.next_gaussian();
      const double p_positive =
          sigmoid(shard.features.row(s).dot(w_true.transpose()));
      shard.labels(s) = stream.next_double() < p_positive ? 1.0 : -1.0;
    }
  }
  return shards;
}

}  // namespace edas
