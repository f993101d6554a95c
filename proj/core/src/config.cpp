#include "edas/config.hpp"

#include <cmath>
#include <fstream>
#include <set>

#include "edas/errors.hpp"

namespace edas {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw ConfigError("config: " + path + " " + what);
}

void check_keys(const json& j, const std::string& path,
                const std::set<std::string>& allowed) {
  for (const auto& item : j.items()) {
    if (!allowed.count(item.key())) {
      fail(path.empty() ? item.key() : path + "." + item.key(),
           "is not a recognized key");
    }
  }
}

const json* find(const json& j, const std::string& key) {
  const auto it = j.find(key);
  return it == j.end() ? nullptr : &*it;
}

long require_int(const json& v, const std::string& path, long lo, long hi) {
  if (!v.is_number_integer()) fail(path, "must be an integer");
  const long x = v.get<long>();
  if (x < lo || x > hi) {
    fail(path, "must be in [" + std::to_string(lo) + ", " +
                   std::to_string(hi) + "], got " + std::to_string(x));
  }
  return x;
}

double require_double(const json& v, const std::string& path, double lo,
                      double hi) {
  if (!v.is_number()) fail(path, "must be a number");
  const double x = v.get<double>();
  if (!(x >= lo && x <= hi)) {
    fail(path, "must be in [" + std::to_string(lo) + ", " +
                   std::to_string(hi) + "], got " + std::to_string(x));
  }
  return x;
}

std::uint64_t require_u64(const json& v, const std::string& path) {
  if (!(v.is_number_unsigned() || (v.is_number_integer() && v.get<long long>() >= 0))) {
    fail(path, "must be a non-negative integer");
  }
  return v.get<std::uint64_t>();
}

std::string require_string(const json& v, const std::string& path) {
  if (!v.is_string()) fail(path, "must be a string");
  return v.get<std::string>();
}

TopologyConfig parse_topology(const json& j) {
  TopologyConfig t;
  if (!j.is_object()) fail("topology", "must be an object");
  check_keys(j, "topology", {"kind", "n", "side", "path", "beta"});
  if (const json* v = find(j, "kind")) t.kind = require_string(*v, "topology.kind");
  if (t.kind != "ring" && t.kind != "grid" && t.kind != "edge-list") {
    fail("topology.kind", "must be ring, grid or edge-list, got \"" + t.kind + "\"");
  }
  if (const json* v = find(j, "n")) {
    t.n = static_cast<int>(require_int(*v, "topology.n", 3, 1 << 20));
  }
  if (const json* v = find(j, "side")) {
    t.side = static_cast<int>(require_int(*v, "topology.side", 2, 1 << 10));
  }
  if (const json* v = find(j, "path")) t.path = require_string(*v, "topology.path");
  if (t.kind == "edge-list" && t.path.empty()) {
    fail("topology.path", "is required for kind edge-list");
  }
  if (const json* v = find(j, "beta")) {
    const double b = require_double(*v, "topology.beta", 0.0, 1.0);
    if (!(b > 0.5 && b < 1.0)) {
      fail("topology.beta", "must lie strictly between 1/2 and 1");
    }
    t.beta = b;
  }
  return t;
}

ProblemConfig parse_problem(const json& j) {
  ProblemConfig p;
  if (!j.is_object()) fail("problem", "must be an object");
  check_keys(j, "problem",
             {"kind", "dim", "noise_sigma", "rho", "minibatch", "per_agent",
              "data_seed", "x_star_tol", "x_star_budget", "images", "labels",
              "digit_positive", "digit_negative", "disjoint"});
  if (const json* v = find(j, "kind")) p.kind = require_string(*v, "problem.kind");
  if (p.kind != "quadratic" && p.kind != "logistic-synthetic" &&
      p.kind != "logistic-mnist") {
    fail("problem.kind",
         "must be quadratic, logistic-synthetic or logistic-mnist, got \"" +
             p.kind + "\"");
  }
  if (const json* v = find(j, "dim")) {
    p.dim = static_cast<int>(require_int(*v, "problem.dim", 1, 1 << 20));
  }
  if (const json* v = find(j, "noise_sigma")) {
    p.noise_sigma = require_double(*v, "problem.noise_sigma", 0.0, 1e12);
  }
  if (const json* v = find(j, "rho")) {
    p.rho = require_double(*v, "problem.rho", 1e-12, 1e12);
  }
  if (const json* v = find(j, "minibatch")) {
    p.minibatch = static_cast<int>(require_int(*v, "problem.minibatch", 1, 1 << 20));
  }
  if (const json* v = find(j, "per_agent")) {
    p.per_agent = static_cast<int>(require_int(*v, "problem.per_agent", 1, 1 << 24));
  }
  if (const json* v = find(j, "data_seed")) {
    p.data_seed = require_u64(*v, "problem.data_seed");
  }
  if (const json* v = find(j, "x_star_tol")) {
    p.x_star_tol = require_double(*v, "problem.x_star_tol", 0.0, 1.0);
  }
  if (const json* v = find(j, "x_star_budget")) {
    p.x_star_budget = require_int(*v, "problem.x_star_budget", 1, 1L << 40);
  }
  if (const json* v = find(j, "images")) p.images = require_string(*v, "problem.images");
  if (const json* v = find(j, "labels")) p.labels = require_string(*v, "problem.labels");
  if (const json* v = find(j, "digit_positive")) {
    p.digit_positive = static_cast<int>(require_int(*v, "problem.digit_positive", 0, 9));
  }
  if (const json* v = find(j, "digit_negative")) {
    p.digit_negative = static_cast<int>(require_int(*v, "problem.digit_negative", 0, 9));
  }
  if (const json* v = find(j, "disjoint")) {
    if (!v->is_boolean()) fail("problem.disjoint", "must be a boolean");
    p.disjoint = v->get<bool>();
  }
  if (p.kind == "logistic-mnist") {
    if (p.images.empty()) fail("problem.images", "is required for logistic-mnist");
    if (p.labels.empty()) fail("problem.labels", "is required for logistic-mnist");
    if (p.digit_positive == p.digit_negative) {
      fail("problem.digit_negative", "must differ from digit_positive");
    }
  }
  if (p.kind == "logistic-synthetic" && p.dim < 2) {
    fail("problem.dim", "must be >= 2 for logistic-synthetic");
  }
  return p;
}

AlgorithmConfig parse_algorithm(const json& v, const std::string& path) {
  AlgorithmConfig a;
  try {
    if (v.is_string()) {
      a.algorithm = algorithm_from_string(v.get<std::string>());
      return a;
    }
    if (!v.is_object()) fail(path, "must be a tag string or an object");
    check_keys(v, path, {"tag", "variant"});
    const json* tag = find(v, "tag");
    if (!tag) fail(path + ".tag", "is required");
    a.algorithm = algorithm_from_string(require_string(*tag, path + ".tag"));
    if (const json* var = find(v, "variant")) {
      if (a.algorithm != Algorithm::kDsgd) {
        fail(path + ".variant", "is only valid for dsgd");
      }
      a.dsgd_variant =
          dsgd_variant_from_string(require_string(*var, path + ".variant"));
    }
  } catch (const ParameterError& e) {
    fail(path, std::string("is invalid: ") + e.what());
  }
  return a;
}

}  // namespace

ExperimentConfig config_from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("config: top level must be an object");
  check_keys(j, "",
             {"schema", "topology", "problem", "algorithms", "stepsize",
              "iterations", "replicas", "seed", "record", "init_value",
              "threads", "output"});
  ExperimentConfig c;
  if (const json* v = find(j, "schema")) {
    c.schema = static_cast<int>(require_int(*v, "schema", 1, 1));
  }
  if (const json* v = find(j, "topology")) c.topology = parse_topology(*v);
  if (const json* v = find(j, "problem")) c.problem = parse_problem(*v);
  if (const json* v = find(j, "algorithms")) {
    if (!v->is_array() || v->empty()) {
      fail("algorithms", "must be a non-empty array");
    }
    c.algorithms.clear();
    for (std::size_t i = 0; i < v->size(); ++i) {
      c.algorithms.push_back(
          parse_algorithm((*v)[i], "algorithms." + std::to_string(i)));
    }
  }
  if (const json* v = find(j, "stepsize")) {
    if (!v->is_object()) fail("stepsize", "must be an object");
    check_keys(*v, "stepsize", {"numerator", "offset"});
    double num = c.stepsize.numerator, off = c.stepsize.offset;
    if (const json* w = find(*v, "numerator")) {
      num = require_double(*w, "stepsize.numerator", 1e-300, 1e300);
    }
    if (const json* w = find(*v, "offset")) {
      off = require_double(*w, "stepsize.offset", 1e-300, 1e300);
    }
    c.stepsize = StepsizeSchedule(num, off);
  }
  if (const json* v = find(j, "iterations")) {
    c.iterations = require_int(*v, "iterations", 0, 1L << 40);
  }
  if (const json* v = find(j, "replicas")) {
    c.replicas = static_cast<int>(require_int(*v, "replicas", 1, 1 << 27));
  }
  if (const json* v = find(j, "seed")) c.seed = require_u64(*v, "seed");
  if (const json* v = find(j, "record")) {
    if (!v->is_array() || v->empty()) fail("record", "must be a non-empty array");
    c.record.clear();
    for (std::size_t i = 0; i < v->size(); ++i) {
      const std::string path = "record." + std::to_string(i);
      try {
        c.record.push_back(metric_from_string(require_string((*v)[i], path)));
      } catch (const ParameterError& e) {
        fail(path, std::string("is invalid: ") + e.what());
      }
    }
  }
  if (const json* v = find(j, "init_value")) {
    c.init_value = require_double(*v, "init_value", -1e300, 1e300);
  }
  if (const json* v = find(j, "threads")) {
    c.threads = static_cast<int>(require_int(*v, "threads", 0, 4096));
  }
  if (const json* v = find(j, "output")) c.output = require_string(*v, "output");
  return c;
}

json config_to_json(const ExperimentConfig& c) {
  json topology{{"kind", c.topology.kind}};
  if (c.topology.kind == "ring") topology["n"] = c.topology.n;
  if (c.topology.kind == "grid") topology["side"] = c.topology.side;
  if (c.topology.kind == "edge-list") topology["path"] = c.topology.path;
  if (c.topology.beta) topology["beta"] = *c.topology.beta;

  json problem{{"kind", c.problem.kind}};
  if (c.problem.kind == "quadratic") {
    problem["dim"] = c.problem.dim;
    problem["noise_sigma"] = c.problem.noise_sigma;
  } else {
    problem["rho"] = c.problem.rho;
    problem["minibatch"] = c.problem.minibatch;
    problem["per_agent"] = c.problem.per_agent;
    problem["data_seed"] = c.problem.data_seed;
    problem["x_star_tol"] = c.problem.x_star_tol;
    problem["x_star_budget"] = c.problem.x_star_budget;
    if (c.problem.kind == "logistic-synthetic") {
      problem["dim"] = c.problem.dim;
    } else {
      problem["images"] = c.problem.images;
      problem["labels"] = c.problem.labels;
      problem["digit_positive"] = c.problem.digit_positive;
      problem["digit_negative"] = c.problem.digit_negative;
      problem["disjoint"] = c.problem.disjoint;
    }
  }

  json algorithms = json::array();
  for (const auto& a : c.algorithms) {
    json entry{{"tag", to_string(a.algorithm)}};
    if (a.algorithm == Algorithm::kDsgd) {
      entry["variant"] = to_string(a.dsgd_variant);
    }
    algorithms.push_back(entry);
  }

  json record = json::array();
  for (const auto m : c.record) record.push_back(to_string(m));

  return json{{"schema", c.schema},
              {"topology", topology},
              {"problem", problem},
              {"algorithms", algorithms},
              {"stepsize",
               {{"numerator", c.stepsize.numerator},
                {"offset", c.stepsize.offset}}},
              {"iterations", c.iterations},
              {"replicas", c.replicas},
              {"seed", c.seed},
              {"record", record},
              {"init_value", c.init_value},
              {"threads", c.threads},
              {"output", c.output}};
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw IoError("cannot open config file: " + path);
  }
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config: " + path + " is not valid JSON: " + e.what());
  }
  return config_from_json(j);
}

void apply_override(json& j, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw ConfigError("override \"" + assignment +
                      "\" must have the form path.to.field=value");
  }
  const std::string path = assignment.substr(0, eq);
  const std::string raw = assignment.substr(eq + 1);

  json value;
  try {
    value = json::parse(raw);
  } catch (const json::parse_error&) {
    value = raw;  // unquoted strings are taken verbatim
  }

  json* node = &j;
  std::size_t begin = 0;
  std::vector<std::string> segments;
  while (begin <= path.size()) {
    const auto dot = path.find('.', begin);
    const auto end = dot == std::string::npos ? path.size() : dot;
    segments.push_back(path.substr(begin, end - begin));
    if (dot == std::string::npos) break;
    begin = dot + 1;
  }
  for (std::size_t s = 0; s < segments.size(); ++s) {
    const std::string& seg = segments[s];
    if (seg.empty()) {
      throw ConfigError("override path \"" + path + "\" has an empty segment");
    }
    const bool last = s + 1 == segments.size();
    const bool numeric = seg.find_first_not_of("0123456789") == std::string::npos;
    if (node->is_array() || (numeric && !node->is_object())) {
      if (!node->is_array()) {
        throw ConfigError("override path \"" + path + "\": segment \"" + seg +
                          "\" indexes a non-array");
      }
      const std::size_t idx = std::stoul(seg);
      if (idx >= node->size()) {
        throw ConfigError("override path \"" + path + "\": index " + seg +
                          " out of range (array has " +
                          std::to_string(node->size()) + " entries)");
      }
      node = &(*node)[idx];
    } else {
      if (!node->is_object()) {
        throw ConfigError("override path \"" + path + "\": segment \"" + seg +
                          "\" descends into a scalar");
      }
      if (last) {
        (*node)[seg] = value;
        return;
      }
      if (!node->contains(seg)) (*node)[seg] = json::object();
      node = &(*node)[seg];
    }
    if (last) {
      *node = value;
      return;
    }
  }
}

}  // namespace edas
