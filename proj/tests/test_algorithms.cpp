#include "edas/algorithms.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "edas/errors.hpp"
#include "edas/graph.hpp"
#include "edas/metrics.hpp"
#include "edas/mixing.hpp"
#include "edas/problems.hpp"
#include "edas/rng.hpp"
#include "test_support.hpp"

using Eigen::MatrixXd;
using Eigen::VectorXd;
using edas::Algorithm;
using edas::ProblemInstance;
using edas::RngStream;
using edas::RunConfig;
using edas::SpectralMixing;
using edas::StepsizeSchedule;

namespace {

SpectralMixing ring_spec(int n) {
  return edas::spectral(edas::lazy_metropolis(edas::ring(n)));
}

// Draw the same stochastic gradients the run loop uses: one stream per
// (agent, iteration) in the noise domain.
MatrixXd sample_gradients(const ProblemInstance& problem, const MatrixXd& x,
                          std::uint64_t seed, std::uint32_t replica, long k) {
  MatrixXd g(x.rows(), x.cols());
  for (int i = 0; i < x.rows(); ++i) {
    RngStream stream(seed, edas::rng_domain::kNoise, replica,
                     static_cast<std::uint32_t>(i),
                     static_cast<std::uint32_t>(k));
    g.row(i) = problem.stochastic_gradient(i, x.row(i).transpose(), stream)
                   .transpose();
  }
  return g;
}

}  // namespace

TEST_CASE("stepsize schedule: values and validation") {
  const StepsizeSchedule s(20.0, 200.0);
  CHECK(s.alpha(0) == doctest::Approx(0.1).epsilon(1e-15));
  CHECK(s.alpha(800) == doctest::Approx(0.02).epsilon(1e-15));
  CHECK(s.theta_for(2.0) == doctest::Approx(40.0));

  const StepsizeSchedule t = StepsizeSchedule::from_theta(5.0, 2.0, 30.0);
  CHECK(t.numerator == doctest::Approx(2.5));
  CHECK(t.offset == doctest::Approx(30.0));

  CHECK_THROWS_AS(StepsizeSchedule(0.0, 1.0), edas::ParameterError);
  CHECK_THROWS_AS(StepsizeSchedule(1.0, 0.0), edas::ParameterError);
  CHECK_THROWS_AS(StepsizeSchedule(-1.0, 1.0), edas::ParameterError);
}

TEST_CASE("algorithm and metric tags round-trip") {
  for (const Algorithm a :
       {Algorithm::kEdas, Algorithm::kEdas3, Algorithm::kDsgd,
        Algorithm::kDsgt, Algorithm::kSgd}) {
    CHECK(edas::algorithm_from_string(edas::to_string(a)) == a);
  }
  CHECK(edas::to_string(Algorithm::kEdas) == "edas");
  CHECK(edas::is_distributed(Algorithm::kEdas));
  CHECK_FALSE(edas::is_distributed(Algorithm::kSgd));
  CHECK_THROWS_AS(edas::algorithm_from_string("nope"), edas::ParameterError);

  CHECK(edas::to_string(edas::DsgdVariant::kCombineThenAdapt) ==
        "combine-and-adapt");
  CHECK(edas::dsgd_variant_from_string("combine-and-adapt") ==
        edas::DsgdVariant::kCombineThenAdapt);
  CHECK(edas::dsgd_variant_from_string("combine-then-adapt") ==
        edas::DsgdVariant::kCombineThenAdapt);
  CHECK(edas::dsgd_variant_from_string("adapt-then-combine") ==
        edas::DsgdVariant::kAdaptThenCombine);
  CHECK_THROWS_AS(edas::dsgd_variant_from_string("x"), edas::ParameterError);

  for (const edas::Metric m :
       {edas::Metric::kMse, edas::Metric::kConsensus, edas::Metric::kMeanSq}) {
    CHECK(edas::metric_from_string(edas::to_string(m)) == m);
  }
}

TEST_CASE("one primal-dual step matches the dense formula") {
  const auto spec = ring_spec(3);
  MatrixXd x0(3, 2), y0(3, 2), g(3, 2);
  x0 << 1, 2, -1, 0.5, 0, -2;
  y0 << 0.1, -0.1, 0.2, 0.0, -0.3, 0.1;
  g << 0.3, 0, -1, 1, 2, -0.5;
  const double alpha = 0.05;

  edas::EdasState state(x0);
  state.y = y0;
  edas::edas_step(state, spec, g, alpha);

  const MatrixXd x1 = spec.w * (x0 - alpha * g) - spec.v * y0;
  const MatrixXd y1 = y0 + spec.v * x1;
  CHECK((state.x - x1).cwiseAbs().maxCoeff() < 1e-14);
  CHECK((state.y - y1).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("first three-term step is the plain adapt-then-combine step") {
  const auto spec = ring_spec(4);
  MatrixXd x0 = MatrixXd::Random(4, 2);
  MatrixXd g = MatrixXd::Random(4, 2);
  const double alpha = 0.07;

  edas::EdasState pd(x0);
  edas::edas_step(pd, spec, g, alpha);
  edas::Edas3State three(x0);
  edas::edas3_step(three, spec.w, g, alpha);
  CHECK((pd.x - three.x).cwiseAbs().maxCoeff() < 1e-14);

  edas::DsgdState dsgd(x0);
  edas::dsgd_step(dsgd, spec.w, g, alpha);
  CHECK((dsgd.x - three.x).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("both exact-diffusion forms track each other for 1000 iterations") {
  const auto spec = ring_spec(5);
  const ProblemInstance problem = edas::quadratic_problem(spec, 1, 0.1);
  const StepsizeSchedule schedule(20.0, 200.0);
  const std::uint64_t seed = 2024;

  MatrixXd x0 = MatrixXd::Zero(5, 1);
  edas::EdasState pd(x0);
  edas::Edas3State three(x0);
  double worst = 0.0;
  for (long k = 0; k < 1000; ++k) {
    const double alpha = schedule.alpha(k);
    edas::edas_step(pd, spec, sample_gradients(problem, pd.x, seed, 0, k),
                    alpha);
    edas::edas3_step(three, spec.w,
                     sample_gradients(problem, three.x, seed, 0, k), alpha);
    const double dev = (pd.x - three.x).norm() / std::max(1.0, pd.x.norm());
    worst = std::max(worst, dev);
  }
  CHECK(worst < 1e-9);
}

TEST_CASE("zero gradients drive the primal-dual pair to consensus") {
  const auto spec = ring_spec(5);
  MatrixXd x0 = MatrixXd::Random(5, 2);
  const VectorXd mean0 = x0.colwise().mean();
  edas::EdasState state(x0);
  const MatrixXd zero = MatrixXd::Zero(5, 2);
  for (int k = 0; k < 600; ++k) {
    edas::edas_step(state, spec, zero, 0.01);
    // The agent average is conserved exactly by the step.
    CHECK((state.x.colwise().mean().transpose() - mean0)
              .cwiseAbs()
              .maxCoeff() < 1e-13);
  }
  const MatrixXd consensus = VectorXd::Ones(5) * mean0.transpose();
  CHECK((state.x - consensus).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("the optimal pair is a fixed point at frozen stepsize") {
  const auto spec = ring_spec(8);
  const ProblemInstance problem = edas::quadratic_problem(spec, 1, 0.1);
  const double alpha = 0.05;

  MatrixXd x = VectorXd::Ones(8) * problem.x_star().transpose();
  MatrixXd g(8, 1);
  for (int i = 0; i < 8; ++i)
    g.row(i) = problem.exact_gradient(i, problem.x_star()).transpose();
  const MatrixXd y_star = edas::dual_target(spec, problem.grad_f_star(), alpha);

  edas::EdasState state(x);
  state.y = y_star;
  edas::edas_step(state, spec, g, alpha);
  CHECK((state.x - x).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((state.y - y_star).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("dsgd variants implement the two orderings") {
  const auto spec = ring_spec(4);
  const MatrixXd x0 = MatrixXd::Random(4, 3);
  const MatrixXd g = MatrixXd::Random(4, 3);
  const double alpha = 0.2;

  edas::DsgdState atc(x0);
  edas::dsgd_step(atc, spec.w, g, alpha, edas::DsgdVariant::kAdaptThenCombine);
  CHECK((atc.x - spec.w * (x0 - alpha * g)).cwiseAbs().maxCoeff() < 1e-14);

  edas::DsgdState cta(x0);
  edas::dsgd_step(cta, spec.w, g, alpha, edas::DsgdVariant::kCombineThenAdapt);
  CHECK((cta.x - (spec.w * x0 - alpha * g)).cwiseAbs().maxCoeff() < 1e-14);

  CHECK((atc.x - cta.x).cwiseAbs().maxCoeff() > 1e-6);
}

TEST_CASE("gradient tracking conserves the tracker average") {
  const auto spec = ring_spec(6);
  const ProblemInstance problem = edas::quadratic_problem(spec, 2, 0.1);
  const StepsizeSchedule schedule(20.0, 200.0);
  const std::uint64_t seed = 5;

  MatrixXd x0 = MatrixXd::Zero(6, 2);
  edas::DsgtState state(x0, sample_gradients(problem, x0, seed, 0, 0));
  for (long k = 0; k < 300; ++k) {
    const MatrixXd x_next =
        edas::dsgt_propose(state, spec.w, schedule.alpha(k));
    const MatrixXd g_next = sample_gradients(problem, x_next, seed, 0, k + 1);
    edas::dsgt_commit(state, spec.w, x_next, g_next);
    const Eigen::RowVectorXd drift =
        state.y.colwise().mean() - state.g.colwise().mean();
    CHECK(drift.cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("on one node every method is centralized SGD") {
  const auto spec = edas::spectral(edas::lazy_metropolis(edas::Graph(1, {})));
  const ProblemInstance problem = edas::quadratic_problem(spec, 2, 0.1);
  RunConfig config;
  config.schedule = StepsizeSchedule(1.0, 10.0);
  config.iterations = 200;
  config.seed = 77;

  std::vector<std::vector<double>> curves;
  for (const Algorithm a :
       {Algorithm::kEdas, Algorithm::kEdas3, Algorithm::kDsgd,
        Algorithm::kDsgt, Algorithm::kSgd}) {
    config.algorithm = a;
    curves.push_back(
        edas::run_single(config, problem, spec, MatrixXd::Zero(1, 2))
            .values[0]);
  }
  for (std::size_t i = 1; i < curves.size(); ++i) {
    REQUIRE(curves[i].size() == curves[0].size());
    for (std::size_t k = 0; k < curves[0].size(); ++k) {
      CHECK(curves[i][k] ==
            doctest::Approx(curves[0][k]).epsilon(1e-12));
    }
  }
}

TEST_CASE("run_single records, validates, and reproduces") {
  const auto spec = ring_spec(4);
  const ProblemInstance problem = edas::quadratic_problem(spec, 1, 0.1);
  RunConfig config;
  config.algorithm = Algorithm::kEdas;
  config.schedule = StepsizeSchedule(20.0, 200.0);
  config.iterations = 50;
  config.seed = 11;
  config.record = {edas::Metric::kMse, edas::Metric::kConsensus,
                   edas::Metric::kMeanSq};
  const MatrixXd x0 = MatrixXd::Zero(4, 1);

  const auto record = edas::run_single(config, problem, spec, x0);
  REQUIRE(record.values.size() == 3);
  for (const auto& curve : record.values) REQUIRE(curve.size() == 51);

  // k = 0 row matches the initial point; the error splits as
  // mse = consensus + mean-square at every k.
  CHECK(record.values[0][0] ==
        doctest::Approx(edas::distributed_mse(x0, problem.x_star())));
  for (std::size_t k = 0; k < 51; ++k) {
    CHECK(record.values[0][k] ==
          doctest::Approx(record.values[1][k] + record.values[2][k])
              .epsilon(1e-12));
  }

  const auto again = edas::run_single(config, problem, spec, x0);
  CHECK(again.values == record.values);
  RunConfig other = config;
  other.replica = 1;
  const auto different = edas::run_single(other, problem, spec, x0);
  CHECK(different.values[0] != record.values[0]);

  RunConfig bad = config;
  bad.iterations = -1;
  CHECK_THROWS_AS(edas::run_single(bad, problem, spec, x0),
                  edas::ParameterError);
  bad = config;
  bad.record.clear();
  CHECK_THROWS_AS(edas::run_single(bad, problem, spec, x0),
                  edas::ParameterError);
  CHECK_THROWS_AS(
      edas::run_single(config, problem, spec, MatrixXd::Zero(3, 1)),
      edas::ParameterError);
}

TEST_CASE("sgd starts from the agent average and records zero consensus") {
  const auto spec = ring_spec(4);
  const ProblemInstance problem = edas::quadratic_problem(spec, 2, 0.1);
  RunConfig config;
  config.algorithm = Algorithm::kSgd;
  config.schedule = StepsizeSchedule(20.0, 200.0);
  config.iterations = 5;
  config.record = {edas::Metric::kMse, edas::Metric::kConsensus};
  MatrixXd x0 = MatrixXd::Random(4, 2);

  const auto record = edas::run_single(config, problem, spec, x0);
  const VectorXd start = x0.colwise().mean();
  CHECK(record.values[0][0] ==
        doctest::Approx((start - problem.x_star()).squaredNorm()));
  for (const double c : record.values[1]) CHECK(c == 0.0);
}

TEST_CASE("blow-ups are reported, not silently propagated") {
  const auto spec = ring_spec(4);
  const ProblemInstance problem = edas::quadratic_problem(spec, 1, 0.1);
  RunConfig config;
  config.algorithm = Algorithm::kEdas;
  config.schedule = StepsizeSchedule(1e6, 1.0);
  config.iterations = 400;
  CHECK(edas_test::throws_with<edas::DivergenceError>(
      [&] {
        edas::run_single(config, problem, spec, MatrixXd::Zero(4, 1));
      },
      "edas"));
}

TEST_CASE("mean-iterate law and dual conservation along a noisy run") {
  const auto spec = ring_spec(5);
  const ProblemInstance problem = edas::quadratic_problem(spec, 1, 0.1);
  const StepsizeSchedule schedule(20.0, 200.0);
  edas::EdasState state(MatrixXd::Zero(5, 1));
  for (long k = 0; k < 200; ++k) {
    const MatrixXd g = sample_gradients(problem, state.x, 31, 0, k);
    const Eigen::RowVectorXd mean_before = state.x.colwise().mean();
    const Eigen::RowVectorXd mean_g = g.colwise().mean();
    edas::edas_step(state, spec, g, schedule.alpha(k));
    const Eigen::RowVectorXd want =
        mean_before - schedule.alpha(k) * mean_g;
    const double scale = std::max(1.0, want.cwiseAbs().maxCoeff());
    CHECK((state.x.colwise().mean() - want).cwiseAbs().maxCoeff() <
          1e-12 * scale);
    CHECK(state.y.colwise().sum().cwiseAbs().maxCoeff() < 1e-10);
  }
}
