#include "phasebeam/errors.hpp"

#include <sstream>

namespace phasebeam {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::invariant_violation: return "invariant_violation";
    case ErrorCode::physics_domain: return "physics_domain";
    case ErrorCode::collimation_undefined: return "collimation_undefined";
    case ErrorCode::retrieval_nonpositive: return "retrieval_nonpositive";
    case ErrorCode::io_failure: return "io_failure";
    case ErrorCode::io_length_mismatch: return "io_length_mismatch";
    case ErrorCode::schema_violation: return "schema_violation";
    case ErrorCode::nonuniform_angles: return "nonuniform_angles";
  }
  return "unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(message), code_(code) {}

namespace {

std::string describe(const std::vector<PixelValue>& pixels, std::size_t total,
                     const std::string& context) {
  std::ostringstream os;
  if (!context.empty()) os << context << ": ";
  os << total << " pixel(s) non-positive after Lorentzian filtering";
  if (!pixels.empty()) {
    os << "; first:";
    for (const auto& p : pixels) {
      os << " (" << p.x << "," << p.y << ")=" << p.value;
    }
  }
  os << ". Consider more exposure, a manual --tau, or --clamp-epsilon.";
  return os.str();
}

}  // namespace

RetrievalError::RetrievalError(std::vector<PixelValue> offending,
                               std::size_t total_offending,
                               const std::string& context)
    : Error(ErrorCode::retrieval_nonpositive,
            describe(offending, total_offending, context)),
      offending_(std::move(offending)),
      total_(total_offending) {}

}  // namespace phasebeam
