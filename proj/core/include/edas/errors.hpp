#ifndef EDAS_ERRORS_HPP
#define EDAS_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace edas {

// Base class for all library errors.  The CLI maps these onto exit codes:
// config/parameter/data problems -> 1, numerical failures -> 2, file I/O -> 3.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Invalid user input: malformed config, out-of-range parameter, bad dataset.
class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error(what) {}
};

class ParameterError : public ConfigError {
 public:
  explicit ParameterError(const std::string& what) : ConfigError(what) {}
};

// Graph construction / connectivity problems.
class TopologyError : public ConfigError {
 public:
  explicit TopologyError(const std::string& what) : ConfigError(what) {}
};

// Malformed binary or text data files (bad magic, truncation, parse errors).
class FormatError : public ConfigError {
 public:
  explicit FormatError(const std::string& what) : ConfigError(what) {}
};

// Dataset does not support the requested partition (too few samples, empty shard).
class DataError : public ConfigError {
 public:
  explicit DataError(const std::string& what) : ConfigError(what) {}
};

// Numerical failure: eigensolver non-convergence, inner solver budget exceeded.
class NumericalError : public Error {
 public:
  explicit NumericalError(const std::string& what) : Error(what) {}
};

// Mixing spectrum unusable for the dual-space change of basis (eigenvalue <= 0).
class SpectrumError : public NumericalError {
 public:
  explicit SpectrumError(const std::string& what) : NumericalError(what) {}
};

// An iterate became non-finite during a run.
class DivergenceError : public NumericalError {
 public:
  explicit DivergenceError(const std::string& what) : NumericalError(what) {}
};

// Filesystem failures while reading or writing result files.
class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(what) {}
};

}  // namespace edas

#endif  // EDAS_ERRORS_HPP
