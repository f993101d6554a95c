#include "edas/algorithms.hpp"

#include <cmath>

#include "edas/errors.hpp"
#include "edas/metrics.hpp"
#include "edas/rng.hpp"

namespace edas {

StepsizeSchedule::StepsizeSchedule(double numerator, double offset)
    : numerator(numerator), offset(offset) {
  if (!(numerator > 0.0) || !std::isfinite(numerator)) {
    throw ParameterError("stepsize numerator must be positive, got " +
                         std::to_string(numerator));
  }
  if (!(offset > 0.0) || !std::isfinite(offset)) {
    throw ParameterError("stepsize offset must be positive, got " +
                         std::to_string(offset));
  }
}

StepsizeSchedule StepsizeSchedule::from_theta(double theta, double mu,
                                              double m) {
  if (!(mu > 0.0)) {
    throw ParameterError("from_theta: mu must be positive");
  }
  return StepsizeSchedule(theta / mu, m);
}

std::string to_string(Algorithm algorithm) {
  switch (algorithm) {
    case Algorithm::kEdas: return "edas";
    case Algorithm::kEdas3: return "edas3";
    case Algorithm::kDsgd: return "dsgd";
    case Algorithm::kDsgt: return "dsgt";
    case Algorithm::kSgd: return "sgd";
  }
  throw ParameterError("unknown algorithm enum value");
}

Algorithm algorithm_from_string(const std::string& tag) {
  if (tag == "edas") return Algorithm::kEdas;
  if (tag == "edas3") return Algorithm::kEdas3;
  if (tag == "dsgd") return Algorithm::kDsgd;
  if (tag == "dsgt") return Algorithm::kDsgt;
  if (tag == "sgd") return Algorithm::kSgd;
  throw ParameterError("unknown algorithm tag \"" + tag +
                       "\" (want edas, edas3, dsgd, dsgt or sgd)");
}

std::string to_string(DsgdVariant variant) {
  return variant == DsgdVariant::kAdaptThenCombine ? "adapt-then-combine"
                                                   : "combine-and-adapt";
}

DsgdVariant dsgd_variant_from_string(const std::string& name) {
  if (name == "adapt-then-combine") return DsgdVariant::kAdaptThenCombine;
  if (name == "combine-and-adapt" || name == "combine-then-adapt") {
    return DsgdVariant::kCombineThenAdapt;
  }
  throw ParameterError("unknown dsgd variant \"" + name + "\"");
}

bool is_distributed(Algorithm algorithm) {
  return algorithm != Algorithm::kSgd;
}

std::string to_string(Metric metric) {
  switch (metric) {
    case Metric::kMse: return "mse";
    case Metric::kConsensus: return "consensus";
    case Metric::kMeanSq: return "mean_sq";
  }
  throw ParameterError("unknown metric enum value");
}

Metric metric_from_string(const std::string& name) {
  if (name == "mse") return Metric::kMse;
  if (name == "consensus") return Metric::kConsensus;
  if (name == "mean_sq") return Metric::kMeanSq;
  throw ParameterError("unknown metric \"" + name +
                       "\" (want mse, consensus or mean_sq)");
}

void edas_step(EdasState& state, const SpectralMixing& spec,
               const Eigen::MatrixXd& g, double alpha) {
  state.x = spec.w * (state.x - alpha * g) - spec.v * state.y;
  state.y.noalias() += spec.v * state.x;
}

void edas3_step(Edas3State& state, const Eigen::MatrixXd& w,
                const Eigen::MatrixXd& g, double alpha) {
  Eigen::MatrixXd next;
  if (!state.have_prev) {
    next = w * (state.x - alpha * g);
    state.have_prev = true;
  } else {
    next = w * (2.0 * state.x - state.x_prev - alpha * g +
                state.alpha_prev * state.g_prev);
  }
  state.x_prev = std::move(state.x);
  state.x = std::move(next);
  state.g_prev = g;
  state.alpha_prev = alpha;
}

void dsgd_step(DsgdState& state, const Eigen::MatrixXd& w,
               const Eigen::MatrixXd& g, double alpha, DsgdVariant variant) {
  if (variant == DsgdVariant::kAdaptThenCombine) {
    state.x = w * (state.x - alpha * g);
  } else {
    state.x = w * state.x - alpha * g;
  }
}

Eigen::MatrixXd dsgt_propose(const DsgtState& state, const Eigen::MatrixXd& w,
                             double alpha) {
  return w * (state.x - alpha * state.y);
}

void dsgt_commit(DsgtState& state, const Eigen::MatrixXd& w,
                 const Eigen::MatrixXd& x_next, const Eigen::MatrixXd& g_next) {
  state.y = w * state.y + g_next - state.g;
  state.x = x_next;
  state.g = g_next;
}

void sgd_step(SgdState& state, const Eigen::VectorXd& mean_gradient,
              double alpha) {
  state.x.noalias() -= alpha * mean_gradient;
}

namespace {

void record_distributed(const Eigen::MatrixXd& x,
                        const Eigen::VectorXd& x_star,
                        const std::vector<Metric>& metrics,
                        std::vector<std::vector<double>>& values) {
  for (std::size_t m = 0; m < metrics.size(); ++m) {
    switch (metrics[m]) {
      case Metric::kMse: values[m].push_back(distributed_mse(x, x_star)); break;
      case Metric::kConsensus: values[m].push_back(consensus_error(x)); break;
      case Metric::kMeanSq: values[m].push_back(mean_error_sq(x, x_star)); break;
    }
  }
}

void record_centralized(const Eigen::VectorXd& x, const Eigen::VectorXd& x_star,
                        const std::vector<Metric>& metrics,
                        std::vector<std::vector<double>>& values) {
  for (std::size_t m = 0; m < metrics.size(); ++m) {
    switch (metrics[m]) {
      case Metric::kMse:
      case Metric::kMeanSq:
        values[m].push_back((x - x_star).squaredNorm());
        break;
      case Metric::kConsensus: values[m].push_back(0.0); break;
    }
  }
}

[[noreturn]] void throw_divergence(Algorithm algorithm, std::uint32_t replica,
                                   long k) {
  throw DivergenceError("algorithm " + to_string(algorithm) + ", replica " +
                        std::to_string(replica) +
                        ": iterate became non-finite at iteration " +
                        std::to_string(k));
}

// Fills g row by row with noisy gradients addressed by iteration k.
class GradientSampler {
 public:
  GradientSampler(const ProblemInstance& problem, std::uint64_t seed,
                  std::uint32_t replica)
      : problem_(problem), seed_(seed), replica_(replica),
        xi_(problem.dim()), gi_(problem.dim()) {}

  void sample(const Eigen::MatrixXd& x, long k, Eigen::MatrixXd& g) {
    for (int i = 0; i < problem_.num_agents(); ++i) {
      RngStream stream(seed_, rng_domain::kNoise, replica_,
                       static_cast<std::uint32_t>(i),
                       static_cast<std::uint32_t>(k));
      xi_ = x.row(i).transpose();
      problem_.stochastic_gradient_into(i, xi_, stream, gi_);
      g.row(i) = gi_.transpose();
    }
  }

  // All agents evaluated at the same point (centralized oracle); returns the
  // mean gradient in `g`.
  void sample_mean(const Eigen::VectorXd& x, long k, Eigen::VectorXd& g) {
    g.setZero();
    for (int i = 0; i < problem_.num_agents(); ++i) {
      RngStream stream(seed_, rng_domain::kNoise, replica_,
                       static_cast<std::uint32_t>(i),
                       static_cast<std::uint32_t>(k));
      problem_.stochastic_gradient_into(i, x, stream, gi_);
      g.noalias() += gi_;
    }
    g /= static_cast<double>(problem_.num_agents());
  }

 private:
  const ProblemInstance& problem_;
  std::uint64_t seed_;
  std::uint32_t replica_;
  Eigen::VectorXd xi_, gi_;
};

}  // namespace

RunRecord run_single(const RunConfig& config, const ProblemInstance& problem,
                     const SpectralMixing& spec, const Eigen::MatrixXd& x0) {
  const int n = problem.num_agents();
  const int p = problem.dim();
  if (spec.n() != n) {
    throw ParameterError("run_single: mixing is " + std::to_string(spec.n()) +
                         " agents, problem has " + std::to_string(n));
  }
  if (x0.rows() != n || x0.cols() != p) {
    throw ParameterError("run_single: x0 must be n x dim");
  }
  if (config.iterations < 0) {
    throw ParameterError("run_single: iterations must be >= 0");
  }
  if (config.record.empty()) {
    throw ParameterError("run_single: no metrics requested");
  }

  RunRecord record;
  record.algorithm = config.algorithm;
  record.replica = config.replica;
  record.seed = config.seed;
  record.metrics = config.record;
  record.values.resize(config.record.size());
  for (auto& v : record.values) {
    v.reserve(static_cast<std::size_t>(config.iterations) + 1);
  }

  GradientSampler sampler(problem, config.seed, config.replica);
  const Eigen::VectorXd& x_star = problem.x_star();
  const long iters = config.iterations;

  if (config.algorithm == Algorithm::kSgd) {
    SgdState state(x0.colwise().mean().transpose());
    Eigen::VectorXd g(p);
    record_centralized(state.x, x_star, config.record, record.values);
    for (long k = 0; k < iters; ++k) {
      sampler.sample_mean(state.x, k, g);
      sgd_step(state, g, config.schedule.alpha(k));
      if (!state.x.allFinite()) throw_divergence(config.algorithm, config.replica, k);
      record_centralized(state.x, x_star, config.record, record.values);
    }
    return record;
  }

  Eigen::MatrixXd g(n, p);
  switch (config.algorithm) {
    case Algorithm::kEdas: {
      EdasState state(x0);
      record_distributed(state.x, x_star, config.record, record.values);
      for (long k = 0; k < iters; ++k) {
        sampler.sample(state.x, k, g);
        edas_step(state, spec, g, config.schedule.alpha(k));
        if (!state.x.allFinite()) throw_divergence(config.algorithm, config.replica, k);
        record_distributed(state.x, x_star, config.record, record.values);
      }
      break;
    }
    case Algorithm::kEdas3: {
      Edas3State state(x0);
      record_distributed(state.x, x_star, config.record, record.values);
      for (long k = 0; k < iters; ++k) {
        sampler.sample(state.x, k, g);
        edas3_step(state, spec.w, g, config.schedule.alpha(k));
        if (!state.x.allFinite()) throw_divergence(config.algorithm, config.replica, k);
        record_distributed(state.x, x_star, config.record, record.values);
      }
      break;
    }
    case Algorithm::kDsgd: {
      DsgdState state(x0);
      record_distributed(state.x, x_star, config.record, record.values);
      for (long k = 0; k < iters; ++k) {
        sampler.sample(state.x, k, g);
        dsgd_step(state, spec.w, g, config.schedule.alpha(k),
                  config.dsgd_variant);
        if (!state.x.allFinite()) throw_divergence(config.algorithm, config.replica, k);
        record_distributed(state.x, x_star, config.record, record.values);
      }
      break;
    }
    case Algorithm::kDsgt: {
      // y0 = g(x0) consumes the iteration-0 noise address; step k then draws
      // fresh gradients at the proposed iterate under address k + 1.
      sampler.sample(x0, 0, g);
      DsgtState state(x0, g);
      record_distributed(state.x, x_star, config.record, record.values);
      Eigen::MatrixXd g_next(n, p);
      for (long k = 0; k < iters; ++k) {
        const Eigen::MatrixXd x_next =
            dsgt_propose(state, spec.w, config.schedule.alpha(k));
        sampler.sample(x_next, k + 1, g_next);
        dsgt_commit(state, spec.w, x_next, g_next);
        if (!state.x.allFinite()) throw_divergence(config.algorithm, config.replica, k);
        record_distributed(state.x, x_star, config.record, record.values);
      }
      break;
    }
    case Algorithm::kSgd: break;  // handled above
  }
  return record;
}

}  // namespace edas
