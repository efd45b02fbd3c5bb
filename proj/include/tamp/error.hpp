#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace tamp {

// Base of every error thrown by the library. The CLI maps these to exit code 1.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Unknown ids, self-loops where forbidden, dimension mismatches.
class DomainError : public Error {
 public:
  using Error::Error;
};

class FiringError : public Error {
 public:
  FiringError(std::size_t transition, std::size_t place, std::size_t step, const std::string& msg)
      : Error(msg), transition_(transition), place_(place), step_(step) {}

  std::size_t transition() const { return transition_; }
  std::size_t deficient_place() const { return place_; }
  // Index in the replayed sequence; 0 for a single fire().
  std::size_t step() const { return step_; }

 private:
  std::size_t transition_;
  std::size_t place_;
  std::size_t step_;
};

// Malformed or inconsistent input data. `where` names the offending location.
class ValidationError : public Error {
 public:
  ValidationError(std::string where, const std::string& msg)
      : Error(where.empty() ? msg : where + ": " + msg), where_(std::move(where)), message_(msg) {}
  const std::string& where() const { return where_; }
  const std::string& message() const { return message_; }

 private:
  std::string where_;
  std::string message_;
};

class SyntaxError : public Error {
 public:
  SyntaxError(std::size_t position, const std::string& msg)
      : Error("syntax error at position " + std::to_string(position) + ": " + msg), position_(position) {}
  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

// Well-formed text that falls outside the conjunctive shape the planner accepts.
class ShapeError : public Error {
 public:
  ShapeError(std::size_t position, const std::string& msg)
      : Error("shape error at position " + std::to_string(position) + ": " + msg), position_(position) {}
  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

class UnknownPropositionError : public Error {
 public:
  explicit UnknownPropositionError(const std::string& atom)
      : Error("unknown proposition: " + atom), atom_(atom) {}
  const std::string& atom() const { return atom_; }

 private:
  std::string atom_;
};

// A configured state budget was exceeded.
class ResourceError : public Error {
 public:
  ResourceError(std::size_t cap, const std::string& msg) : Error(msg), cap_(cap) {}
  std::size_t cap() const { return cap_; }

 private:
  std::size_t cap_;
};

class CacheError : public Error {
 public:
  enum class Kind { kVersion, kDigest, kFormat, kIo };
  CacheError(Kind kind, const std::string& msg) : Error(msg), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

// Internal data turned out inconsistent (e.g. a corrupt graph edge).
class IntegrityError : public Error {
 public:
  using Error::Error;
};

class UsageError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace tamp
