#include "edas/harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <thread>

#include "edas/errors.hpp"
#include "edas/idx.hpp"
#include "edas/metrics.hpp"

namespace edas {

namespace {

std::string resolve_data_path(const std::string& path) {
  namespace fs = std::filesystem;
  if (path.empty() || fs::exists(path) || fs::path(path).is_absolute()) {
    return path;
  }
  if (const char* dir = std::getenv("EDASLAB_DATA_DIR")) {
    const fs::path candidate = fs::path(dir) / path;
    if (fs::exists(candidate)) return candidate.string();
  }
  return path;
}

int effective_threads(int configured) {
  if (configured > 0) return configured;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

bool contains(const std::vector<Metric>& metrics, Metric m) {
  for (const auto x : metrics) {
    if (x == m) return true;
  }
  return false;
}

}  // namespace

Graph build_graph(const TopologyConfig& topology) {
  if (topology.kind == "ring") return ring(topology.n);
  if (topology.kind == "grid") return grid(topology.side);
  if (topology.kind == "edge-list") return load_edge_list(topology.path);
  throw ConfigError("config: topology.kind \"" + topology.kind +
                    "\" is not recognized");
}

SpectralMixing build_mixing(const TopologyConfig& topology) {
  Eigen::MatrixXd w = lazy_metropolis(build_graph(topology));
  if (topology.beta) w = beta_shift(w, *topology.beta);
  return spectral(w);
}

ProblemInstance build_problem(const ProblemConfig& problem,
                              const SpectralMixing& spec) {
  if (problem.kind == "quadratic") {
    return quadratic_problem(spec, problem.dim, problem.noise_sigma);
  }
  if (problem.kind == "logistic-synthetic") {
    return logistic_problem(
        synthetic_logistic_data(spec.n(), problem.per_agent, problem.dim,
                                problem.data_seed),
        problem.rho, problem.minibatch, problem.x_star_tol,
        problem.x_star_budget);
  }
  if (problem.kind == "logistic-mnist") {
    MnistPartitionOptions options;
    options.per_agent = problem.per_agent;
    options.digit_positive = problem.digit_positive;
    options.digit_negative = problem.digit_negative;
    options.disjoint = problem.disjoint;
    options.seed = problem.data_seed;
    return logistic_problem(
        load_mnist_binary_partition(resolve_data_path(problem.images),
                                    resolve_data_path(problem.labels),
                                    spec.n(), options),
        problem.rho, problem.minibatch, problem.x_star_tol,
        problem.x_star_budget);
  }
  throw ConfigError("config: problem.kind \"" + problem.kind +
                    "\" is not recognized");
}

namespace {

// Replica-averaged curves for one algorithm.  Work is farmed out to threads
// in blocks, but the accumulation happens in replica order on the caller
// thread, so thread count and scheduling cannot change the result.
std::vector<std::vector<double>> average_replicas(
    const AlgorithmConfig& algorithm, const ExperimentConfig& config,
    const ProblemInstance& problem, const SpectralMixing& spec,
    const Eigen::MatrixXd& x0, int threads) {
  const auto metric_count = config.record.size();
  const auto length = static_cast<std::size_t>(config.iterations) + 1;
  std::vector<std::vector<double>> sums(
      metric_count, std::vector<double>(length, 0.0));

  RunConfig run;
  run.algorithm = algorithm.algorithm;
  run.dsgd_variant = algorithm.dsgd_variant;
  run.schedule = config.stepsize;
  run.iterations = config.iterations;
  run.seed = config.seed;
  run.record = config.record;

  constexpr int kBlock = 64;  // bounds per-replica buffer memory
  for (int begin = 0; begin < config.replicas; begin += kBlock) {
    const int end = std::min(config.replicas, begin + kBlock);
    std::vector<RunRecord> block(static_cast<std::size_t>(end - begin));
    std::atomic<int> next{begin};
    std::exception_ptr failure;
    std::mutex failure_mutex;

    auto worker = [&]() {
      for (;;) {
        const int r = next.fetch_add(1);
        if (r >= end) return;
        try {
          RunConfig mine = run;
          mine.replica = static_cast<std::uint32_t>(r);
          block[static_cast<std::size_t>(r - begin)] =
              run_single(mine, problem, spec, x0);
        } catch (...) {
          std::lock_guard<std::mutex> lock(failure_mutex);
          if (!failure) failure = std::current_exception();
          return;
        }
      }
    };

    const int workers = std::min(threads, end - begin);
    if (workers <= 1) {
      worker();
    } else {
      std::vector<std::thread> pool;
      pool.reserve(static_cast<std::size_t>(workers));
      for (int t = 0; t < workers; ++t) pool.emplace_back(worker);
      for (auto& t : pool) t.join();
    }
    if (failure) std::rethrow_exception(failure);

    for (int r = begin; r < end; ++r) {
      const auto& record = block[static_cast<std::size_t>(r - begin)];
      for (std::size_t m = 0; m < metric_count; ++m) {
        for (std::size_t k = 0; k < length; ++k) {
          sums[m][k] += record.values[m][k];
        }
      }
    }
  }

  for (auto& curve : sums) {
    for (auto& v : curve) v /= static_cast<double>(config.replicas);
  }
  return sums;
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& config) {
  const SpectralMixing spec = build_mixing(config.topology);
  const ProblemInstance problem = build_problem(config.problem, spec);
  const Eigen::MatrixXd x0 =
      Eigen::MatrixXd::Constant(problem.num_agents(), problem.dim(),
                                config.init_value);
  const int threads = effective_threads(config.threads);

  ExperimentResult result;
  result.config_echo = config_to_json(config);
  result.iterations = config.iterations;
  result.replicas = config.replicas;
  result.metrics = config.record;

  result.metadata = nlohmann::json{
      {"rng", "philox4x32-10"},
      {"n", problem.num_agents()},
      {"dim", problem.dim()},
      {"lambda2", spec.lambda2()},
      {"lambda_n", spec.lambda_n()},
      {"gap", spec.gap()},
      {"mu", problem.mu()},
      {"lipschitz", problem.lipschitz()},
      {"sigma_bar_sq", problem.sigma_bar_sq()},
      {"grad_star_norm", problem.grad_f_star_norm()},
      {"x_star_norm", problem.x_star().norm()},
      {"conventions",
       {{"dsgd_default", "adapt-then-combine"},
        {"dsgt_init", "y0 = g(x0)"},
        {"sgd_start", "row mean of x0"},
        {"logistic_sigma_sq", "exact enumeration bound at minibatch size"},
        {"mnist", "pixels / 255, bias appended, disjoint shards"}}}};

  for (const auto& algorithm : config.algorithms) {
    AlgorithmTrajectories out;
    out.algorithm = algorithm;
    out.mean = average_replicas(algorithm, config, problem, spec, x0, threads);
    result.algorithms.push_back(std::move(out));
  }

  // Transient times against the centralized baseline, on the averaged MSE.
  if (contains(config.record, Metric::kMse)) {
    std::size_t mse_index = 0;
    for (std::size_t m = 0; m < config.record.size(); ++m) {
      if (config.record[m] == Metric::kMse) mse_index = m;
    }
    const AlgorithmTrajectories* sgd = nullptr;
    for (const auto& a : result.algorithms) {
      if (a.algorithm.algorithm == Algorithm::kSgd) sgd = &a;
    }
    if (sgd != nullptr) {
      for (auto& a : result.algorithms) {
        if (is_distributed(a.algorithm.algorithm)) {
          a.transient = transient_time(a.mean[mse_index], sgd->mean[mse_index]);
        }
      }
    }
  }
  return result;
}

std::string format_double(double value) {
  char buffer[64];
  const auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
  if (ec != std::errc()) {
    throw NumericalError("format_double: conversion failed");
  }
  return std::string(buffer, ptr);
}

std::string result_csv(const ExperimentResult& result) {
  std::string out = "k";
  for (const auto& a : result.algorithms) {
    for (const auto m : result.metrics) {
      out += "," + to_string(a.algorithm.algorithm) + "_" + to_string(m);
    }
  }
  out += "\n";
  const auto rows = static_cast<std::size_t>(result.iterations) + 1;
  for (std::size_t k = 0; k < rows; ++k) {
    out += std::to_string(k);
    for (const auto& a : result.algorithms) {
      for (std::size_t m = 0; m < result.metrics.size(); ++m) {
        out += ",";
        out += format_double(a.mean[m][k]);
      }
    }
    out += "\n";
  }
  return out;
}

nlohmann::json result_json(const ExperimentResult& result) {
  nlohmann::json algorithms = nlohmann::json::array();
  for (const auto& a : result.algorithms) {
    nlohmann::json entry{{"tag", to_string(a.algorithm.algorithm)}};
    if (a.algorithm.algorithm == Algorithm::kDsgd) {
      entry["variant"] = to_string(a.algorithm.dsgd_variant);
    }
    nlohmann::json curves;
    nlohmann::json finals;
    for (std::size_t m = 0; m < result.metrics.size(); ++m) {
      curves[to_string(result.metrics[m])] = a.mean[m];
      finals[to_string(result.metrics[m])] = a.mean[m].back();
    }
    entry["trajectories"] = curves;
    entry["final"] = finals;
    if (a.transient) {
      entry["transient"] = *a.transient;
    } else if (is_distributed(a.algorithm.algorithm)) {
      entry["transient"] = nullptr;
    }
    algorithms.push_back(entry);
  }
  return nlohmann::json{{"config", result.config_echo},
                        {"metadata", result.metadata},
                        {"algorithms", algorithms}};
}

void write_text_file(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path p(path);
  std::error_code ec;
  if (p.has_parent_path()) {
    fs::create_directories(p.parent_path(), ec);
    if (ec) {
      throw IoError("cannot create directory " + p.parent_path().string() +
                    ": " + ec.message());
    }
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw IoError("cannot open output file: " + path);
  }
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  out.flush();
  if (!out) {
    throw IoError("write failure on output file: " + path);
  }
}

void emit_csv(const ExperimentResult& result, const std::string& path) {
  write_text_file(path, result_csv(result));
}

void emit_json(const ExperimentResult& result, const std::string& path) {
  write_text_file(path, result_json(result).dump(2) + "\n");
}

CsvTable parse_result_csv(const std::string& text) {
  CsvTable table;
  std::size_t pos = 0;
  long line_no = 0;
  while (pos < text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string::npos) nl = text.size();
    const std::string_view line(text.data() + pos, nl - pos);
    ++line_no;
    if (!line.empty()) {
      std::vector<std::string_view> cells;
      std::size_t cell_start = 0;
      for (std::size_t i = 0; i <= line.size(); ++i) {
        if (i == line.size() || line[i] == ',') {
          cells.push_back(line.substr(cell_start, i - cell_start));
          cell_start = i + 1;
        }
      }
      if (line_no == 1) {
        for (const auto& c : cells) table.header.emplace_back(c);
        if (table.header.empty() || table.header[0] != "k") {
          throw FormatError("csv: header must start with column k");
        }
        table.columns.resize(table.header.size() - 1);
      } else {
        if (cells.size() != table.header.size()) {
          throw FormatError("csv line " + std::to_string(line_no) + ": got " +
                            std::to_string(cells.size()) + " cells, expected " +
                            std::to_string(table.header.size()));
        }
        long k = 0;
        auto [p0, e0] =
            std::from_chars(cells[0].data(), cells[0].data() + cells[0].size(), k);
        if (e0 != std::errc() || p0 != cells[0].data() + cells[0].size()) {
          throw FormatError("csv line " + std::to_string(line_no) +
                            ": bad iteration index");
        }
        table.k.push_back(k);
        for (std::size_t c = 1; c < cells.size(); ++c) {
          double v = 0.0;
          auto [p1, e1] =
              std::from_chars(cells[c].data(), cells[c].data() + cells[c].size(), v);
          if (e1 != std::errc() || p1 != cells[c].data() + cells[c].size()) {
            throw FormatError("csv line " + std::to_string(line_no) +
                              ": bad number in column " +
                              std::to_string(c + 1));
          }
          table.columns[c - 1].push_back(v);
        }
      }
    }
    pos = nl + 1;
  }
  if (table.header.empty()) {
    throw FormatError("csv: empty input");
  }
  return table;
}

TransientSweepResult transient_sweep(const ExperimentConfig& base,
                                     const std::vector<int>& sizes,
                                     double multiplier, long horizon_cap) {
  if (sizes.empty()) {
    throw ConfigError("transient_sweep: no sizes given");
  }
  if (base.topology.kind != "ring" && base.topology.kind != "grid") {
    throw ConfigError("transient_sweep: topology must be ring or grid");
  }
  if (base.iterations < 1) {
    throw ConfigError("transient_sweep: base iterations must be >= 1");
  }
  if (!(multiplier > 0.0) || horizon_cap < base.iterations) {
    throw ConfigError("transient_sweep: bad multiplier or horizon cap");
  }

  TransientSweepResult sweep;
  sweep.base_config = config_to_json(base);
  sweep.multiplier = multiplier;
  sweep.horizon_cap = horizon_cap;

  for (const int size : sizes) {
    ExperimentConfig config = base;
    if (config.topology.kind == "ring") {
      config.topology.n = size;
    } else {
      const int side = static_cast<int>(std::lround(std::sqrt(size)));
      if (side * side != size) {
        throw ConfigError("transient_sweep: size " + std::to_string(size) +
                          " is not a perfect square for a grid topology");
      }
      config.topology.side = side;
    }
    // The sweep itself only needs the exact-diffusion run and the baseline.
    config.algorithms = {AlgorithmConfig{Algorithm::kEdas, DsgdVariant::kAdaptThenCombine},
                         AlgorithmConfig{Algorithm::kSgd, DsgdVariant::kAdaptThenCombine}};
    config.record = {Metric::kMse};

    TransientSweepRow row;
    row.size = size;
    for (;;) {
      const ExperimentResult result = run_experiment(config);
      row.lambda2 = result.metadata["lambda2"].get<double>();
      row.gap = result.metadata["gap"].get<double>();
      row.measured = result.algorithms.front().transient;
      row.horizon = config.iterations;
      if (row.measured || config.iterations >= horizon_cap) break;
      config.iterations = std::min(horizon_cap, config.iterations * 2);
    }
    row.headline = static_cast<double>(size) / row.gap;
    row.bound = multiplier * row.headline;
    sweep.rows.push_back(row);
  }
  return sweep;
}

std::string sweep_csv(const TransientSweepResult& sweep) {
  // `transient` is -1 when the horizon cap was reached without crossing.
  std::string out = "n,lambda2,gap,transient,horizon,headline,bound\n";
  for (const auto& row : sweep.rows) {
    out += std::to_string(row.size);
    out += "," + format_double(row.lambda2);
    out += "," + format_double(row.gap);
    out += "," + std::to_string(row.measured ? *row.measured : -1);
    out += "," + std::to_string(row.horizon);
    out += "," + format_double(row.headline);
    out += "," + format_double(row.bound);
    out += "\n";
  }
  return out;
}

nlohmann::json sweep_json(const TransientSweepResult& sweep) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : sweep.rows) {
    nlohmann::json r{{"n", row.size},        {"lambda2", row.lambda2},
                     {"gap", row.gap},       {"horizon", row.horizon},
                     {"headline", row.headline}, {"bound", row.bound}};
    if (row.measured) {
      r["transient"] = *row.measured;
    } else {
      r["transient"] = nullptr;
    }
    rows.push_back(r);
  }
  return nlohmann::json{{"config", sweep.base_config},
                        {"multiplier", sweep.multiplier},
                        {"horizon_cap", sweep.horizon_cap},
                        {"rows", rows}};
}

}  // namespace edas
