#pragma once

#include <stdexcept>
#include <string>

namespace placebocil {

// Base for everything the engine can throw. The CLI maps ConfigError to
// exit code 2 and every other Error to exit code 1.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid configuration, schedule/class mismatches, unreadable input files.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Tensor dimension mismatches; the message names the offending layer.
class ShapeError : public Error {
 public:
  using Error::Error;
};

// Contract violations on values (labels out of range, rewards outside [0,1]).
class DomainError : public Error {
 public:
  using Error::Error;
};

// Strict-memory-budget violations and infeasible removal requests.
class BudgetError : public Error {
 public:
  using Error::Error;
};

// Drawing from a stream whose pool holds no samples at all.
class StreamExhaustedError : public Error {
 public:
  using Error::Error;
};

// Placebo refill asked for more candidates than the buffer holds.
class RefillUnderflowError : public Error {
 public:
  using Error::Error;
};

}  // namespace placebocil
