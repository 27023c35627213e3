#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace phasebeam {

/// Stable error categories. The CLI maps each one to a distinct exit code.
enum class ErrorCode {
  invariant_violation = 2,
  physics_domain = 3,
  collimation_undefined = 4,
  retrieval_nonpositive = 5,
  io_failure = 6,
  io_length_mismatch = 7,
  schema_violation = 8,
  nonuniform_angles = 9,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// A value object was constructed with fields that break its invariants.
class InvariantError : public Error {
 public:
  explicit InvariantError(const std::string& message)
      : Error(ErrorCode::invariant_violation, message) {}
};

/// A formula was evaluated outside the domain where it is defined.
class PhysicsError : public Error {
 public:
  explicit PhysicsError(const std::string& message,
                        ErrorCode code = ErrorCode::physics_domain)
      : Error(code, message) {}
};

struct PixelValue {
  std::size_t x;
  std::size_t y;
  double value;
};

/// The Lorentzian-filtered image has pixels that cannot be log-transformed.
class RetrievalError : public Error {
 public:
  RetrievalError(std::vector<PixelValue> offending, std::size_t total_offending,
                 const std::string& context = {});

  /// First few offending pixels (capped); total_offending() has the full count.
  const std::vector<PixelValue>& offending() const noexcept { return offending_; }
  std::size_t total_offending() const noexcept { return total_; }

 private:
  std::vector<PixelValue> offending_;
  std::size_t total_;
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& message,
                   ErrorCode code = ErrorCode::io_failure)
      : Error(code, message) {}
};

class SchemaError : public Error {
 public:
  explicit SchemaError(const std::string& message)
      : Error(ErrorCode::schema_violation, message) {}
};

}  // namespace phasebeam
