#pragma once

#include <stdexcept>
#include <string>

namespace metsob {

// Numeric values are part of the C API (see metsob.h) and must stay stable.
enum class ErrorCode : int {
  InvalidArgument = 1,
  NoSuchPoint = 2,
  InsufficientGeometry = 3,
  UnresolvableScale = 4,
  NotConnected = 5,
  DegenerateMetric = 6,
  HypothesisFailed = 7,
  RadiusBelowResolution = 8,
  EmptyPatch = 9,
  ZeroDistance = 10,
  SupercriticalTrace = 11,
  PreconditionFailed = 12,
  NoAdmissibleCurve = 13,
  Io = 14,
  Parse = 15,
  Internal = 16,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

inline void require(bool cond, ErrorCode code, const std::string& what) {
  if (!cond) fail(code, what);
}

}  // namespace metsob
