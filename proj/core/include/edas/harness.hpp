#ifndef EDAS_HARNESS_HPP
#define EDAS_HARNESS_HPP

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "edas/config.hpp"
#include "edas/graph.hpp"
#include "edas/mixing.hpp"
#include "edas/problems.hpp"

namespace edas {

Graph build_graph(const TopologyConfig& topology);
SpectralMixing build_mixing(const TopologyConfig& topology);
// For logistic-mnist, relative dataset paths that don't resolve are also
// tried under $EDASLAB_DATA_DIR.
ProblemInstance build_problem(const ProblemConfig& problem,
                              const SpectralMixing& spec);

struct AlgorithmTrajectories {
  AlgorithmConfig algorithm;
  // mean[m][k]: metric m (config order) averaged over replicas, k = 0..K.
  std::vector<std::vector<double>> mean;
  // Iterations until the averaged distributed MSE first stays within a factor
  // 2 of the centralized baseline; set when the run includes sgd and mse.
  std::optional<long> transient;
};

struct ExperimentResult {
  nlohmann::json config_echo;  // canonical config
  nlohmann::json metadata;     // rng id, spectrum, problem constants, conventions
  long iterations = 0;
  int replicas = 0;
  std::vector<Metric> metrics;
  std::vector<AlgorithmTrajectories> algorithms;
};

// Runs every configured algorithm for `replicas` independent replicas and
// averages the recorded curves.  Replicas are distributed over worker threads
// but summed in replica order, so the result is bit-identical for any thread
// count.
ExperimentResult run_experiment(const ExperimentConfig& config);

// CSV with header k,<tag>_<metric>,... (column groups in config algorithm
// order), LF line endings, doubles in shortest round-trip form.
std::string result_csv(const ExperimentResult& result);
nlohmann::json result_json(const ExperimentResult& result);

void emit_csv(const ExperimentResult& result, const std::string& path);
void emit_json(const ExperimentResult& result, const std::string& path);
// Creates parent directories; throws IoError with the path on failure.
void write_text_file(const std::string& path, const std::string& content);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<long> k;
  // columns[c][row] for data columns (header[c + 1]).
  std::vector<std::vector<double>> columns;
};
CsvTable parse_result_csv(const std::string& text);

struct TransientSweepRow {
  int size = 0;
  double lambda2 = 0.0;
  double gap = 0.0;
  std::optional<long> measured;  // empty if not reached within the cap
  long horizon = 0;              // horizon at which the sweep stopped
  double headline = 0.0;         // n / (1 - lambda2)
  double bound = 0.0;            // multiplier * headline
};

struct TransientSweepResult {
  nlohmann::json base_config;
  double multiplier = 0.0;
  long horizon_cap = 0;
  std::vector<TransientSweepRow> rows;
};

// Measures the transient time of the exact-diffusion run against the
// centralized baseline for each network size (ring n or grid with side^2 =
// size), doubling the horizon and re-running until the transient is observed
// or `horizon_cap` is hit.
TransientSweepResult transient_sweep(const ExperimentConfig& base,
                                     const std::vector<int>& sizes,
                                     double multiplier = 6.0,
                                     long horizon_cap = 1L << 20);

std::string sweep_csv(const TransientSweepResult& sweep);
nlohmann::json sweep_json(const TransientSweepResult& sweep);

// Shortest round-trip decimal form of a double (the CSV number format).
std::string format_double(double value);

}  // namespace edas

#endif  // EDAS_HARNESS_HPP
