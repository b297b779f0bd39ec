#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace dwl {

// Every failure raised by the library derives from Error so callers can
// catch at one level and still report which module gave up.
class Error : public std::runtime_error {
 public:
  Error(std::string module, const std::string& what)
      : std::runtime_error(module + ": " + what), module_(std::move(module)) {}

  const std::string& module() const noexcept { return module_; }

 private:
  std::string module_;
};

class DegenerateWell : public Error {
 public:
  explicit DegenerateWell(const std::string& what) : Error("lattice", what) {}
};

class BadDomain : public Error {
 public:
  explicit BadDomain(const std::string& what) : Error("dynamics", what) {}
};

class NonHermitianResidual : public Error {
 public:
  explicit NonHermitianResidual(const std::string& what) : Error("dynamics", what) {}
};

class ConvergenceFailure : public Error {
 public:
  explicit ConvergenceFailure(const std::string& what) : Error("spectral", what) {}
};

class PoorOverlap : public Error {
 public:
  explicit PoorOverlap(const std::string& what) : Error("spectral", what) {}
};

class ParseError : public Error {
 public:
  ParseError(int line, const std::string& what)
      : Error("config", "line " + std::to_string(line) + ": " + what), line_(line) {}
  int line() const noexcept { return line_; }

 private:
  int line_;
};

class ValidationError : public Error {
 public:
  ValidationError(std::string key, const std::string& what)
      : Error("config", key + ": " + what), key_(std::move(key)) {}
  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

class UnknownPreset : public Error {
 public:
  explicit UnknownPreset(const std::string& id) : Error("presets", "unknown preset '" + id + "'") {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error("io", what) {}
};

}  // namespace dwl
