#include "edas/metrics.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <optional>
#include <vector>

#include "doctest.h"
#include "edas/algorithms.hpp"
#include "edas/errors.hpp"
#include "edas/graph.hpp"
#include "edas/mixing.hpp"
#include "edas/problems.hpp"

using Eigen::MatrixXd;
using Eigen::VectorXd;
using edas::ProblemInstance;
using edas::SpectralMixing;

namespace {

SpectralMixing ring_spec(int n) {
  return edas::spectral(edas::lazy_metropolis(edas::ring(n)));
}

}  // namespace

TEST_CASE("error metrics: hand values and the Pythagorean split") {
  MatrixXd x(2, 2);
  x << 1, 1, 3, 3;
  VectorXd star(2);
  star << 2, 2;
  CHECK(edas::distributed_mse(x, star) == doctest::Approx(2.0));
  CHECK(edas::consensus_error(x) == doctest::Approx(2.0));
  CHECK(edas::mean_error_sq(x, star) == doctest::Approx(0.0));

  const MatrixXd r = MatrixXd::Random(6, 3);
  const VectorXd s = VectorXd::Random(3);
  CHECK(edas::distributed_mse(r, s) ==
        doctest::Approx(edas::consensus_error(r) + edas::mean_error_sq(r, s))
            .epsilon(1e-12));
}

TEST_CASE("transient detection: first index past the warm-up") {
  std::vector<double> cent(400), dist(400);
  for (int k = 0; k < 400; ++k) cent[k] = 1.0 / (k + 1.0);

  SUBCASE("identical curves cross immediately after the warm-up") {
    dist = cent;
    CHECK(edas::transient_time(dist, cent) == std::optional<long>(101));
  }
  SUBCASE("a late crossing is found exactly") {
    for (int k = 0; k < 400; ++k)
      dist[k] = (k < 250 ? 3.0 : 1.9) * cent[k];
    CHECK(edas::transient_time(dist, cent) == std::optional<long>(250));
  }
  SUBCASE("curves that never meet give no index") {
    for (int k = 0; k < 400; ++k) dist[k] = 10.0 * cent[k];
    CHECK_FALSE(edas::transient_time(dist, cent).has_value());
  }
  SUBCASE("inflating the distributed curve never hastens the crossing") {
    for (int k = 0; k < 400; ++k)
      dist[k] = (k < 150 ? 2.5 : 1.5) * cent[k];
    const auto before = edas::transient_time(dist, cent);
    std::vector<double> inflated = dist;
    for (auto& v : inflated) v *= 1.4;
    const auto after = edas::transient_time(inflated, cent);
    REQUIRE(before.has_value());
    if (after.has_value()) CHECK(*after >= *before);
  }
  SUBCASE("length mismatch is an error") {
    dist.resize(399);
    CHECK_THROWS_AS(edas::transient_time(dist, cent), std::invalid_argument);
  }
  SUBCASE("the factor is adjustable") {
    for (int k = 0; k < 400; ++k) dist[k] = 2.5 * cent[k];
    CHECK_FALSE(edas::transient_time(dist, cent, 2.0).has_value());
    CHECK(edas::transient_time(dist, cent, 3.0) == std::optional<long>(101));
  }
}

TEST_CASE("the dual target solves the optimality equation") {
  const auto spec = ring_spec(8);
  const ProblemInstance problem = edas::quadratic_problem(spec, 1, 0.1);
  const edas::StepsizeSchedule schedule(20.0, 200.0);
  for (const long k : {0L, 10L, 100L}) {
    const double alpha = schedule.alpha(k);
    const MatrixXd y_star =
        edas::dual_target(spec, problem.grad_f_star(), alpha);
    const MatrixXd residual =
        alpha * spec.w * problem.grad_f_star() + spec.v * y_star;
    CHECK(residual.norm() < 1e-8);
    CHECK(y_star.colwise().sum().cwiseAbs().maxCoeff() < 1e-10);
  }
  // The consensual stack of the minimizer lies in the kernel of V.
  const MatrixXd star_stack = VectorXd::Ones(8) * problem.x_star().transpose();
  CHECK((spec.v * star_stack).norm() < 1e-10);
}

TEST_CASE("transformed coordinates along a noiseless trajectory") {
  const auto spec = ring_spec(5);
  const ProblemInstance problem = edas::quadratic_problem(spec, 1, 0.0);
  const edas::BDecomposition bd =
      edas::b_decomposition(spec, edas::choose_c(spec));
  const edas::StepsizeSchedule schedule(20.0, 200.0);

  edas::EdasState state(MatrixXd::Zero(5, 1));
  MatrixXd g(5, 1);

  double t0 = -1.0;
  double t_mid = 0.0;
  double t_final = 0.0;
  for (long k = 0; k <= 30000; ++k) {
    const double alpha = schedule.alpha(k);
    const MatrixXd y_star =
        edas::dual_target(spec, problem.grad_f_star(), alpha);
    const auto tc = edas::transformed_coords(state.x, state.y,
                                             problem.x_star(), y_star, bd);

    // The conserved coordinate is identically zero along the recursion.
    CHECK(tc.zhat.cwiseAbs().maxCoeff() < 1e-10);

    // Change of basis round-trips to the original deviations.
    const MatrixXd x_tilde =
        state.x - VectorXd::Ones(5) * problem.x_star().transpose();
    const MatrixXd y_tilde = state.y - y_star;
    if (k % 500 == 0) {
      CHECK((edas::reconstruct_x_tilde(tc, bd) - x_tilde)
                .cwiseAbs()
                .maxCoeff() < 1e-9);
      CHECK((edas::reconstruct_y_tilde(tc, bd) - y_tilde)
                .cwiseAbs()
                .maxCoeff() < 1e-9);

      // Deviation bound: ||x_tilde||^2 <= 2n ||zbar||^2 + 2||U_R||^2 ||zcheck||^2.
      const double lhs = x_tilde.squaredNorm();
      const double rhs = 2.0 * 5 * tc.zbar.squaredNorm() +
                         2.0 * bd.norm_ur * bd.norm_ur * tc.zcheck.squaredNorm();
      CHECK(lhs <= rhs * (1.0 + 1e-8) + 1e-12);
    }

    const double t_k = tc.zcheck.squaredNorm();
    if (k == 0) t0 = t_k;
    if (k == 15000) t_mid = t_k;
    t_final = t_k;

    for (int i = 0; i < 5; ++i)
      g.row(i) = problem
                     .exact_gradient(i, state.x.row(i).transpose())
                     .transpose();
    edas::edas_step(state, spec, g, alpha);
  }
  // Without noise the contracting coordinate is slaved to the drift of the
  // moving dual target, which shrinks like (alpha_k - alpha_{k+1})^2 ~ k^-4:
  // it keeps falling by ~16x per doubling of k instead of settling, and by
  // k = 30000 it has dropped ten decades below its starting value.
  REQUIRE(t0 > 0.0);
  CHECK(t_final <= 1e-10 * t0);
  CHECK(t_final <= t_mid / 8.0);
}

TEST_CASE("combined error is eventually monotone without noise") {
  const auto spec = ring_spec(5);
  const ProblemInstance problem = edas::quadratic_problem(spec, 1, 0.0);
  const edas::BDecomposition bd =
      edas::b_decomposition(spec, edas::choose_c(spec));
  const MatrixXd x0 = MatrixXd::Zero(5, 1);
  const double theta = 20.0 * problem.mu();
  const auto constants =
      edas::theoretical_constants(spec, problem, theta, 200.0, x0);
  const edas::StepsizeSchedule schedule(20.0, 200.0);

  edas::EdasState state(x0);
  MatrixXd g(5, 1);
  double previous = -1.0;
  for (long k = 0; k <= 3000; ++k) {
    const double alpha = schedule.alpha(k);
    const MatrixXd y_star =
        edas::dual_target(spec, problem.grad_f_star(), alpha);
    const auto tc = edas::transformed_coords(state.x, state.y,
                                             problem.x_star(), y_star, bd);
    const double m_k = tc.zbar.squaredNorm();
    const double t_k = tc.zcheck.squaredNorm();
    const double h_k = m_k + edas::omega_k(constants, k) * t_k;
    if (k > 100) {
      CHECK(h_k <= previous * (1.0 + 1e-9) + 1e-20);
    }
    previous = h_k;

    for (int i = 0; i < 5; ++i)
      g.row(i) = problem
                     .exact_gradient(i, state.x.row(i).transpose())
                     .transpose();
    edas::edas_step(state, spec, g, alpha);
  }
}

TEST_CASE("transformed coordinates validate their shapes") {
  const auto spec = ring_spec(5);
  const edas::BDecomposition bd = edas::b_decomposition(spec);
  const MatrixXd ok = MatrixXd::Zero(5, 2);
  const VectorXd star = VectorXd::Zero(2);
  CHECK_THROWS_AS(edas::transformed_coords(MatrixXd::Zero(4, 2), ok, star,
                                           ok, bd),
                  std::invalid_argument);
  CHECK_THROWS_AS(edas::transformed_coords(ok, ok, VectorXd::Zero(3), ok, bd),
                  std::invalid_argument);
}

TEST_CASE("analysis constants: frozen rational values on ring(3)") {
  const auto spec = ring_spec(3);
  const ProblemInstance problem = edas::quadratic_problem(spec, 1, 0.1);
  const MatrixXd x0 = MatrixXd::Zero(3, 1);
  const auto tc = edas::theoretical_constants(spec, problem, 5.0, 480.0, x0);

  CHECK(tc.q0 == doctest::Approx(0.875).epsilon(1e-12));
  CHECK(tc.m_min_mixing == doctest::Approx(240.0).epsilon(1e-12));
  // L = mu and ||U_R|| ||U_L|| = 2 here, so the function term is 480.
  CHECK(tc.m_min_function == doctest::Approx(480.0).epsilon(1e-10));
  CHECK(tc.m_min == doctest::Approx(480.0).epsilon(1e-10));
  CHECK(tc.p2 == doctest::Approx(0.25 / 9.0).epsilon(1e-12));
  CHECK(tc.p3 == doctest::Approx(20.0).epsilon(1e-10));
  CHECK(tc.centralized_m_min == doctest::Approx(5.0));
  CHECK(tc.sqrt_lambda2 == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(tc.norm_ur == doctest::Approx(std::sqrt(2.0)).epsilon(1e-10));
  CHECK(tc.norm_ul == doctest::Approx(std::sqrt(2.0)).epsilon(1e-10));
  CHECK(tc.c == doctest::Approx(std::sqrt(6.0)).epsilon(1e-10));
  CHECK(tc.h0 >= 0.0);
  CHECK(tc.h0 > (0.0 - problem.x_star()(0)) * (0.0 - problem.x_star()(0)) -
                    1e-12);

  // The coupling weight decays with the stepsize.
  CHECK(edas::omega_k(tc, 0) > edas::omega_k(tc, 100));
  CHECK(edas::omega_k(tc, 0) == doctest::Approx(tc.omega0));
}

TEST_CASE("analysis constants: guardrails and warnings") {
  const auto spec = ring_spec(3);
  const ProblemInstance problem = edas::quadratic_problem(spec, 1, 0.1);
  const MatrixXd x0 = MatrixXd::Zero(3, 1);

  CHECK_THROWS_AS(edas::theoretical_constants(spec, problem, 3.0, 480.0, x0),
                  edas::ParameterError);
  CHECK_THROWS_AS(edas::theoretical_constants(spec, problem, 2.0, 480.0, x0),
                  edas::ParameterError);

  const auto narrow =
      edas::theoretical_constants(spec, problem, 3.5, 480.0, x0);
  CHECK_FALSE(narrow.warnings.empty());
  const auto small_m =
      edas::theoretical_constants(spec, problem, 6.0, 10.0, x0);
  CHECK_FALSE(small_m.warnings.empty());
  const auto clean =
      edas::theoretical_constants(spec, problem, 6.0, 1000.0, x0);
  CHECK(clean.warnings.empty());
}

TEST_CASE("transient-time prediction terms") {
  const auto spec4 = ring_spec(4);
  const ProblemInstance p4 = edas::quadratic_problem(spec4, 1, 0.1);
  const auto bound4 =
      edas::transient_bound(spec4, p4, MatrixXd::Zero(4, 1));
  CHECK(bound4.term_consensus == doctest::Approx(8.0).epsilon(1e-12));
  CHECK(bound4.headline == doctest::Approx(8.0).epsilon(1e-12));
  CHECK(bound4.dominant >= bound4.term_consensus);
  CHECK(bound4.dominant >= bound4.term_gradient);
  CHECK(bound4.dominant >= bound4.term_init);
  CHECK(bound4.dominant >= bound4.term_log);

  const auto spec3 = ring_spec(3);
  const ProblemInstance p3 = edas::quadratic_problem(spec3, 1, 0.1);
  const auto bound3 =
      edas::transient_bound(spec3, p3, MatrixXd::Zero(3, 1));
  CHECK(bound3.term_consensus == doctest::Approx(4.0).epsilon(1e-12));

  // Homogeneous agents started at the minimizer: only the consensus and
  // log terms survive.
  std::vector<edas::LogisticShard> shards(2);
  for (auto& shard : shards) {
    shard.features = MatrixXd::Zero(1, 2);
    shard.features(0, 0) = 1.0;
    shard.labels = VectorXd::Ones(1);
  }
  const ProblemInstance same = edas::logistic_problem(shards);
  const auto spec2 = edas::spectral(
      edas::lazy_metropolis(edas::Graph(2, {{0, 1}})));
  const MatrixXd at_star = VectorXd::Ones(2) * same.x_star().transpose();
  const auto degenerate = edas::transient_bound(spec2, same, at_star);
  // The minimizer is only known to solver tolerance, so the gradient term is
  // tiny rather than exactly zero.
  CHECK(degenerate.term_gradient < 1e-4);
  CHECK(degenerate.term_init == 0.0);
  CHECK(std::isfinite(degenerate.term_log));
  CHECK(degenerate.dominant > 0.0);
}

TEST_CASE("reference decay curves and the coefficient ratio") {
  const auto curves = edas::reference_rate_curves(5.0, 100.0, 0.01, 2.0, 8, 50);
  REQUIRE(curves.asymptotic.size() == 50);
  REQUIRE(curves.centralized.size() == 50);

  // 4 theta^2 / ((3 theta - 2) n mu^2) and theta^2 / ((2 theta - 1) n mu^2).
  CHECK(curves.asymptotic_coefficient ==
        doctest::Approx(4.0 * 25.0 * 0.01 / (13.0 * 8.0 * 4.0))
            .epsilon(1e-12));
  CHECK(curves.centralized_coefficient ==
        doctest::Approx(25.0 * 0.01 / (9.0 * 8.0 * 4.0)).epsilon(1e-12));
  CHECK(curves.asymptotic_coefficient / curves.centralized_coefficient ==
        doctest::Approx(36.0 / 13.0).epsilon(1e-12));
  CHECK(curves.asymptotic[10] ==
        doctest::Approx(curves.asymptotic_coefficient / 110.0)
            .epsilon(1e-12));

  // Doubling the network halves both reference curves.
  const auto wide = edas::reference_rate_curves(5.0, 100.0, 0.01, 2.0, 16, 50);
  CHECK(wide.asymptotic[0] ==
        doctest::Approx(curves.asymptotic[0] / 2.0).epsilon(1e-12));

  CHECK_THROWS_AS(edas::reference_rate_curves(0.5, 100.0, 0.01, 2.0, 8, 10),
                  edas::ParameterError);
  const auto tight = edas::reference_rate_curves(4.0, 100.0, 0.01, 2.0, 8, 10);
  CHECK_FALSE(tight.warnings.empty());
}
