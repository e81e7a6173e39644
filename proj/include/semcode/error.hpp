#pragma once

#include <stdexcept>
#include <string>

namespace semcode {

enum class ErrorClass {
  contract,  // precondition or invariant violation
  parse,     // malformed input text
  io,        // filesystem failure
  config,    // invalid or inconsistent configuration
  lookup,    // unknown key in a lookup environment
  numeric,   // non-finite value where a finite one is required
  locked,    // output directory already in use
};

inline const char* error_class_name(ErrorClass c) {
  switch (c) {
    case ErrorClass::contract: return "contract";
    case ErrorClass::parse: return "parse";
    case ErrorClass::io: return "io";
    case ErrorClass::config: return "config";
    case ErrorClass::lookup: return "lookup";
    case ErrorClass::numeric: return "numeric";
    case ErrorClass::locked: return "locked";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorClass cls, const std::string& msg)
      : std::runtime_error(msg), cls_(cls) {}

  ErrorClass cls() const { return cls_; }
  const char* class_name() const { return error_class_name(cls_); }

 private:
  ErrorClass cls_;
};

[[noreturn]] inline void fail(ErrorClass cls, const std::string& msg) {
  throw Error(cls, msg);
}

// No-allocation check for hot paths.
inline void require(bool cond, ErrorClass cls, const char* msg) {
  if (!cond) fail(cls, msg);
}

}  // namespace semcode
