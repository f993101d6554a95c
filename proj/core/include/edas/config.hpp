#ifndef EDAS_CONFIG_HPP
#define EDAS_CONFIG_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "edas/algorithms.hpp"

namespace edas {

struct TopologyConfig {
  std::string kind = "ring";  // ring | grid | edge-list
  int n = 8;                  // ring node count
  int side = 3;               // grid side length
  std::string path;           // edge-list file
  std::optional<double> beta; // optional spectrum shift in (1/2, 1)
};

struct ProblemConfig {
  std::string kind = "quadratic";  // quadratic | logistic-synthetic | logistic-mnist
  // quadratic / logistic-synthetic dimension.
  int dim = 1;
  double noise_sigma = 0.1;        // quadratic gradient noise
  double rho = 1.0;                // logistic regularizer
  int minibatch = 1;
  int per_agent = 100;             // samples per agent (logistic kinds)
  std::uint64_t data_seed = 0;
  double x_star_tol = 1e-10;
  long x_star_budget = 500000;
  std::string images, labels;      // IDX paths (logistic-mnist)
  int digit_positive = 1;
  int digit_negative = 2;
  bool disjoint = true;
};

struct AlgorithmConfig {
  Algorithm algorithm = Algorithm::kEdas;
  DsgdVariant dsgd_variant = DsgdVariant::kAdaptThenCombine;
};

struct ExperimentConfig {
  int schema = 1;
  TopologyConfig topology;
  ProblemConfig problem;
  std::vector<AlgorithmConfig> algorithms{AlgorithmConfig{}};
  StepsizeSchedule stepsize{20.0, 200.0};
  long iterations = 1000;
  int replicas = 1;
  std::uint64_t seed = 0;
  std::vector<Metric> record{Metric::kMse};
  double init_value = 0.0;
  int threads = 1;  // 0 = hardware concurrency
  std::string output;
};

// Strict parse: unknown keys, wrong types and out-of-range values are
// rejected with the offending field path in the message.
ExperimentConfig config_from_json(const nlohmann::json& j);
// Canonical form: defaults materialized, kind-irrelevant keys dropped, keys
// sorted.  config_from_json(config_to_json(c)) round-trips byte-identically.
nlohmann::json config_to_json(const ExperimentConfig& config);
ExperimentConfig load_config(const std::string& path);

// "--set path.to.field=value" style override applied to the raw JSON before
// parsing; the value is parsed as JSON when possible, else taken as a string.
// Array elements are addressed by numeric path segments.
void apply_override(nlohmann::json& j, const std::string& assignment);

}  // namespace edas

#endif  // EDAS_CONFIG_HPP
