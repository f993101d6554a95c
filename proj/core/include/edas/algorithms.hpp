#ifndef EDAS_ALGORITHMS_HPP
#define EDAS_ALGORITHMS_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "edas/mixing.hpp"
#include "edas/problems.hpp"

namespace edas {

// alpha_k = numerator / (k + offset).  With theta/(mu (k + m)) factored the
// usual way, numerator = theta/mu and offset = m.
struct StepsizeSchedule {
  double numerator = 1.0;
  double offset = 1.0;

  StepsizeSchedule() = default;
  StepsizeSchedule(double numerator, double offset);
  static StepsizeSchedule from_theta(double theta, double mu, double m);

  double alpha(long k) const {
    return numerator / (static_cast<double>(k) + offset);
  }
  double theta_for(double mu) const { return numerator * mu; }
};

enum class Algorithm { kEdas, kEdas3, kDsgd, kDsgt, kSgd };
enum class DsgdVariant { kAdaptThenCombine, kCombineThenAdapt };

std::string to_string(Algorithm algorithm);
Algorithm algorithm_from_string(const std::string& tag);
std::string to_string(DsgdVariant variant);
DsgdVariant dsgd_variant_from_string(const std::string& name);
bool is_distributed(Algorithm algorithm);

// Iterate matrices are n x p, row i = agent i.  Gradient matrices g match.

// Primal-dual exact diffusion: x' = W(x - alpha g) - V y;  y' = y + V x'.
struct EdasState {
  Eigen::MatrixXd x, y;
  explicit EdasState(const Eigen::MatrixXd& x0)
      : x(x0), y(Eigen::MatrixXd::Zero(x0.rows(), x0.cols())) {}
};
void edas_step(EdasState& state, const SpectralMixing& spec,
               const Eigen::MatrixXd& g, double alpha);

// The same recursion with the dual eliminated.  First step x1 = W(x0 - a0 g0),
// then x_{k+1} = W(2 x_k - x_{k-1} - a_k g_k + a_{k-1} g_{k-1}).
struct Edas3State {
  Eigen::MatrixXd x, x_prev, g_prev;
  double alpha_prev = 0.0;
  bool have_prev = false;
  explicit Edas3State(const Eigen::MatrixXd& x0) : x(x0) {}
};
void edas3_step(Edas3State& state, const Eigen::MatrixXd& w,
                const Eigen::MatrixXd& g, double alpha);

// Decentralized SGD, adapt-then-combine x' = W(x - alpha g) by default, or
// combine-then-adapt x' = W x - alpha g.
struct DsgdState {
  Eigen::MatrixXd x;
  explicit DsgdState(const Eigen::MatrixXd& x0) : x(x0) {}
};
void dsgd_step(DsgdState& state, const Eigen::MatrixXd& w,
               const Eigen::MatrixXd& g, double alpha,
               DsgdVariant variant = DsgdVariant::kAdaptThenCombine);

// Gradient tracking: x' = W(x - alpha y);  y' = W y + g(x') - g(x), with
// y0 = g(x0).  Split in two phases because the fresh gradients are evaluated
// at the proposed iterate.
struct DsgtState {
  Eigen::MatrixXd x, y, g;
  DsgtState(const Eigen::MatrixXd& x0, const Eigen::MatrixXd& g0)
      : x(x0), y(g0), g(g0) {}
};
Eigen::MatrixXd dsgt_propose(const DsgtState& state, const Eigen::MatrixXd& w,
                             double alpha);
void dsgt_commit(DsgtState& state, const Eigen::MatrixXd& w,
                 const Eigen::MatrixXd& x_next,
                 const Eigen::MatrixXd& g_next);

// Single-machine baseline on f = (1/n) sum f_i: x' = x - alpha mean_i g_i(x).
struct SgdState {
  Eigen::VectorXd x;
  explicit SgdState(const Eigen::VectorXd& x0) : x(x0) {}
};
void sgd_step(SgdState& state, const Eigen::VectorXd& mean_gradient,
              double alpha);

enum class Metric { kMse, kConsensus, kMeanSq };
std::string to_string(Metric metric);
Metric metric_from_string(const std::string& name);

struct RunConfig {
  Algorithm algorithm = Algorithm::kEdas;
  DsgdVariant dsgd_variant = DsgdVariant::kAdaptThenCombine;
  StepsizeSchedule schedule;
  long iterations = 0;
  std::uint64_t seed = 0;
  std::uint32_t replica = 0;
  std::vector<Metric> record{Metric::kMse};
};

struct RunRecord {
  Algorithm algorithm = Algorithm::kEdas;
  std::uint32_t replica = 0;
  std::uint64_t seed = 0;
  std::vector<Metric> metrics;
  // values[m][k] for k = 0..iterations (initial point included).
  std::vector<std::vector<double>> values;
};

// One replica of one algorithm.  Gradient noise is addressed by
// (seed, noise domain, replica, agent, iteration), so the record is a pure
// function of its arguments.  Throws DivergenceError if an iterate goes
// non-finite.  For kSgd the single iterate starts at the row mean of x0;
// its kMse/kMeanSq is ||x - x_star||^2 and kConsensus is 0.
RunRecord run_single(const RunConfig& config, const ProblemInstance& problem,
                     const SpectralMixing& spec, const Eigen::MatrixXd& x0);

}  // namespace edas

#endif  // EDAS_ALGORITHMS_HPP
