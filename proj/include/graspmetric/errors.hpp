#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace graspmetric {

// Base for every error raised by the library. `kind()` is the short
// machine-facing name printed by the CLI ("ParseError", "KTooLarge", ...).
class GraspError : public std::runtime_error {
 public:
  GraspError(std::string kind, const std::string& what)
      : std::runtime_error(kind + ": " + what), kind_(std::move(kind)) {}
  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

// Errors caused by bad user input (files, config, arguments).
class InputError : public GraspError {
  using GraspError::GraspError;
};

// Errors raised by a computation on otherwise valid input.
class ComputeError : public GraspError {
  using GraspError::GraspError;
};

struct ParseError : InputError {
  explicit ParseError(const std::string& what) : InputError("ParseError", what) {}
};
struct EmptyMesh : InputError {
  explicit EmptyMesh(const std::string& what) : InputError("EmptyMesh", what) {}
};
struct ConfigError : InputError {
  explicit ConfigError(const std::string& what) : InputError("ConfigError", what) {}
};
struct IoError : InputError {
  explicit IoError(const std::string& what) : InputError("IoError", what) {}
};
struct UnknownObjectId : InputError {
  explicit UnknownObjectId(const std::string& id)
      : InputError("UnknownObjectId", "no object '" + id + "' in scene") {}
};

// Carries the 1-based line number of the offending row.
struct SchemaError : InputError {
  SchemaError(std::size_t line, const std::string& what)
      : InputError("SchemaError", "line " + std::to_string(line) + ": " + what), line(line) {}
  std::size_t line;
};

struct KTooLarge : ComputeError {
  KTooLarge(std::size_t k, std::size_t n)
      : ComputeError("KTooLarge", "k=" + std::to_string(k) + " exceeds point count " +
                                      std::to_string(n)) {}
};
struct InvalidFrame : ComputeError {
  explicit InvalidFrame(const std::string& what = "contact frame is not valid")
      : ComputeError("InvalidFrame", what) {}
};
struct DegenerateContacts : ComputeError {
  explicit DegenerateContacts(const std::string& what = "contact points coincide")
      : ComputeError("DegenerateContacts", what) {}
};

}  // namespace graspmetric
