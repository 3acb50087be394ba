#pragma once

#include <stdexcept>
#include <string>

namespace sgvi {

// Base for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid argument values (sizes, temperatures, empty batches, ...).
class ArgumentError : public Error {
 public:
  using Error::Error;
};

// Mismatched vector/matrix dimensions. The message names the offending node
// or map where one exists.
class ShapeError : public Error {
 public:
  using Error::Error;
};

// Graph structure violates one of the SceneFactorGraph invariants.
class GraphError : public Error {
 public:
  using Error::Error;
};

// Joint state space is larger than the enumeration cap.
class StateSpaceError : public Error {
 public:
  StateSpaceError(const std::string& what, double size)
      : Error(what), size_(size) {}
  double size() const noexcept { return size_; }

 private:
  double size_;
};

// Configuration validation failure; `path()` is the dotted key path.
class ConfigError : public Error {
 public:
  ConfigError(std::string path, const std::string& what)
      : Error(path + ": " + what), path_(std::move(path)) {}
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

// Training produced a non-finite loss or parameter.
class DivergenceError : public Error {
 public:
  using Error::Error;
};

}  // namespace sgvi
