#pragma once

#include <stdexcept>
#include <string>

namespace ofl {

enum class ErrorKind {
  kParse,           // malformed input files or CLI configuration
  kInvalid,         // structurally invalid instance or misuse of an operation
  kSizeGuard,       // exhaustive-search size limits exceeded
  kInvariant,       // a checked runtime guarantee failed
  kInfeasible,      // no feasible action exists
  kNonTermination,  // serve loop exceeded its termination bound
  kNumeric,         // exact arithmetic overflow
  kInternal,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace ofl
