// Command-line front end: run experiments, sweep transient times over network
// sizes, and inspect mixing spectra and theoretical constants.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "edas/bdecomp.hpp"
#include "edas/config.hpp"
#include "edas/errors.hpp"
#include "edas/harness.hpp"
#include "edas/metrics.hpp"

namespace {

struct CommonOptions {
  std::string config_path;
  std::vector<std::string> overrides;
};

edas::ExperimentConfig load_with_overrides(const CommonOptions& options) {
  std::ifstream in(options.config_path);
  if (!in) {
    throw edas::IoError("cannot open config file: " + options.config_path);
  }
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw edas::ConfigError("config: " + options.config_path +
                            " is not valid JSON: " + e.what());
  }
  for (const auto& assignment : options.overrides) {
    edas::apply_override(j, assignment);
  }
  return edas::config_from_json(j);
}

void add_common(CLI::App* cmd, CommonOptions& options) {
  cmd->add_option("-c,--config", options.config_path, "experiment config JSON")
      ->required();
  cmd->add_option("-s,--set", options.overrides,
                  "override a config field, e.g. --set topology.n=16");
}

void print_kv(const char* key, const std::string& value) {
  std::printf("%-22s %s\n", key, value.c_str());
}

int cmd_run(const CommonOptions& options, const std::string& out_override) {
  edas::ExperimentConfig config = load_with_overrides(options);
  if (!out_override.empty()) config.output = out_override;

  const edas::ExperimentResult result = edas::run_experiment(config);
  for (const auto& a : result.algorithms) {
    std::string line = edas::to_string(a.algorithm.algorithm) + ": final";
    for (std::size_t m = 0; m < result.metrics.size(); ++m) {
      line += " " + edas::to_string(result.metrics[m]) + "=" +
              edas::format_double(a.mean[m].back());
    }
    if (a.transient) {
      line += " transient=" + std::to_string(*a.transient);
    } else if (edas::is_distributed(a.algorithm.algorithm)) {
      line += " transient=not-reached";
    }
    std::puts(line.c_str());
  }
  if (!config.output.empty()) {
    edas::emit_csv(result, config.output + ".csv");
    edas::emit_json(result, config.output + ".json");
    std::puts(("wrote " + config.output + ".csv and " + config.output + ".json")
                  .c_str());
  }
  return 0;
}

int cmd_sweep(const CommonOptions& options, const std::vector<int>& sizes,
              double multiplier, long cap, const std::string& out_override) {
  edas::ExperimentConfig config = load_with_overrides(options);
  if (!out_override.empty()) config.output = out_override;

  const edas::TransientSweepResult sweep =
      edas::transient_sweep(config, sizes, multiplier, cap);
  std::fputs(edas::sweep_csv(sweep).c_str(), stdout);
  if (!config.output.empty()) {
    edas::write_text_file(config.output + ".csv", edas::sweep_csv(sweep));
    edas::write_text_file(config.output + ".json",
                          edas::sweep_json(sweep).dump(2) + "\n");
    std::puts(("wrote " + config.output + ".csv and " + config.output + ".json")
                  .c_str());
  }
  return 0;
}

int cmd_spectral(const CommonOptions& options, bool as_json) {
  const edas::ExperimentConfig config = load_with_overrides(options);
  const edas::SpectralMixing spec = edas::build_mixing(config.topology);

  std::string product = "unavailable (eigenvalue <= 0; try topology.beta)";
  double product_value = -1.0;
  try {
    const edas::BDecomposition bd = edas::b_decomposition(spec, 1.0);
    product_value = bd.norm_ul * bd.norm_ur;
    product = edas::format_double(product_value);
  } catch (const edas::SpectrumError&) {
  }

  if (as_json) {
    nlohmann::json j{{"n", spec.n()},
                     {"lambda2", spec.lambda2()},
                     {"lambda_n", spec.lambda_n()},
                     {"gap", spec.gap()},
                     {"one_over_gap", 1.0 / spec.gap()},
                     {"vpinv_norm", spec.vpinv_norm()}};
    if (product_value >= 0.0) {
      j["norm_ul_times_norm_ur"] = product_value;
    } else {
      j["norm_ul_times_norm_ur"] = nullptr;
    }
    std::puts(j.dump(2).c_str());
    return 0;
  }
  print_kv("n", std::to_string(spec.n()));
  print_kv("lambda2", edas::format_double(spec.lambda2()));
  print_kv("lambda_n", edas::format_double(spec.lambda_n()));
  print_kv("gap", edas::format_double(spec.gap()));
  print_kv("one_over_gap", edas::format_double(1.0 / spec.gap()));
  print_kv("vpinv_norm", edas::format_double(spec.vpinv_norm()));
  print_kv("norm_ul*norm_ur", product);
  return 0;
}

int cmd_bounds(const CommonOptions& options, bool as_json) {
  const edas::ExperimentConfig config = load_with_overrides(options);
  const edas::SpectralMixing spec = edas::build_mixing(config.topology);
  const edas::ProblemInstance problem =
      edas::build_problem(config.problem, spec);
  const Eigen::MatrixXd x0 = Eigen::MatrixXd::Constant(
      problem.num_agents(), problem.dim(), config.init_value);

  const double theta = config.stepsize.theta_for(problem.mu());
  const double m = config.stepsize.offset;
  const edas::TheoreticalConstants tc =
      edas::theoretical_constants(spec, problem, theta, m, x0);
  const edas::TransientBound tb = edas::transient_bound(spec, problem, x0);

  if (as_json) {
    nlohmann::json j{{"theta", tc.theta},
                     {"m", tc.m},
                     {"mu", tc.mu},
                     {"lipschitz", tc.lipschitz},
                     {"sigma_bar_sq", tc.sigma_bar_sq},
                     {"lambda2", tc.lambda2},
                     {"gap", tc.gap},
                     {"c", tc.c},
                     {"norm_ul", tc.norm_ul},
                     {"norm_ur", tc.norm_ur},
                     {"m_min", tc.m_min},
                     {"m_min_mixing", tc.m_min_mixing},
                     {"m_min_function", tc.m_min_function},
                     {"q0", tc.q0},
                     {"p2", tc.p2},
                     {"p3", tc.p3},
                     {"p5", tc.p5},
                     {"q2", tc.q2},
                     {"q3", tc.q3},
                     {"q4", tc.q4},
                     {"c0", tc.c0},
                     {"omega0", tc.omega0},
                     {"h0", tc.h0},
                     {"h_hat1", tc.h_hat1},
                     {"h_hat2", tc.h_hat2},
                     {"asymptotic_coefficient", tc.asymptotic_coefficient},
                     {"centralized_coefficient", tc.centralized_coefficient},
                     {"centralized_m_min", tc.centralized_m_min},
                     {"transient_bound",
                      {{"term_consensus", tb.term_consensus},
                       {"term_gradient", tb.term_gradient},
                       {"term_init", tb.term_init},
                       {"term_log", tb.term_log},
                       {"dominant", tb.dominant},
                       {"headline", tb.headline}}},
                     {"warnings", tc.warnings}};
    std::puts(j.dump(2).c_str());
    return 0;
  }

  print_kv("theta", edas::format_double(tc.theta));
  print_kv("m", edas::format_double(tc.m));
  print_kv("mu", edas::format_double(tc.mu));
  print_kv("lipschitz", edas::format_double(tc.lipschitz));
  print_kv("sigma_bar_sq", edas::format_double(tc.sigma_bar_sq));
  print_kv("lambda2", edas::format_double(tc.lambda2));
  print_kv("gap", edas::format_double(tc.gap));
  print_kv("c", edas::format_double(tc.c));
  print_kv("norm_ul", edas::format_double(tc.norm_ul));
  print_kv("norm_ur", edas::format_double(tc.norm_ur));
  print_kv("m_min", edas::format_double(tc.m_min));
  print_kv("q0", edas::format_double(tc.q0));
  print_kv("p2", edas::format_double(tc.p2));
  print_kv("p3", edas::format_double(tc.p3));
  print_kv("p5", edas::format_double(tc.p5));
  print_kv("q2", edas::format_double(tc.q2));
  print_kv("q3", edas::format_double(tc.q3));
  print_kv("q4", edas::format_double(tc.q4));
  print_kv("c0", edas::format_double(tc.c0));
  print_kv("omega0", edas::format_double(tc.omega0));
  print_kv("h0", edas::format_double(tc.h0));
  print_kv("h_hat1", edas::format_double(tc.h_hat1));
  print_kv("h_hat2", edas::format_double(tc.h_hat2));
  print_kv("asymptotic_coeff", edas::format_double(tc.asymptotic_coefficient));
  print_kv("centralized_coeff", edas::format_double(tc.centralized_coefficient));
  print_kv("centralized_m_min", edas::format_double(tc.centralized_m_min));
  print_kv("kt_consensus", edas::format_double(tb.term_consensus));
  print_kv("kt_gradient", edas::format_double(tb.term_gradient));
  print_kv("kt_init", edas::format_double(tb.term_init));
  print_kv("kt_log", edas::format_double(tb.term_log));
  print_kv("kt_dominant", edas::format_double(tb.dominant));
  for (const auto& w : tc.warnings) {
    std::puts(("warning: " + w).c_str());
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"decentralized stochastic optimization lab"};
  app.require_subcommand(1);

  CommonOptions run_options, sweep_options, spectral_options, bounds_options;
  std::string run_out, sweep_out;
  std::vector<int> sweep_sizes;
  double sweep_multiplier = 6.0;
  long sweep_cap = 1L << 20;
  bool spectral_json = false, bounds_json = false;

  CLI::App* run = app.add_subcommand("run", "run the configured experiment");
  add_common(run, run_options);
  run->add_option("-o,--out", run_out, "output prefix (.csv and .json)");

  CLI::App* sweep = app.add_subcommand(
      "transient-sweep", "measure transient times across network sizes");
  add_common(sweep, sweep_options);
  sweep->add_option("--sizes", sweep_sizes, "network sizes, e.g. 8,12,16,20")
      ->required()
      ->delimiter(',');
  sweep->add_option("--multiplier", sweep_multiplier,
                    "bound multiplier on n/gap");
  sweep->add_option("--cap", sweep_cap, "horizon cap for auto-extension");
  sweep->add_option("-o,--out", sweep_out, "output prefix (.csv and .json)");

  CLI::App* spectral_cmd =
      app.add_subcommand("spectral", "print mixing spectrum diagnostics");
  add_common(spectral_cmd, spectral_options);
  spectral_cmd->add_flag("--json", spectral_json, "emit JSON");

  CLI::App* bounds_cmd = app.add_subcommand(
      "bounds", "print theoretical constants and transient predictions");
  add_common(bounds_cmd, bounds_options);
  bounds_cmd->add_flag("--json", bounds_json, "emit JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (run->parsed()) return cmd_run(run_options, run_out);
    if (sweep->parsed()) {
      return cmd_sweep(sweep_options, sweep_sizes, sweep_multiplier, sweep_cap,
                       sweep_out);
    }
    if (spectral_cmd->parsed()) {
      return cmd_spectral(spectral_options, spectral_json);
    }
    if (bounds_cmd->parsed()) return cmd_bounds(bounds_options, bounds_json);
  } catch (const edas::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const edas::IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const edas::NumericalError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
