#pragma once

#include <stdexcept>
#include <string>

namespace cqed {

// Base for every error raised by the library. kind() is a stable identifier
// used in machine-readable diagnostics.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& what)
      : std::runtime_error(what), kind_(std::move(kind)) {}
  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

#define CQED_DEFINE_ERROR(Name)                                       \
  class Name : public Error {                                         \
   public:                                                            \
    explicit Name(const std::string& what) : Error(#Name, what) {}    \
  };

CQED_DEFINE_ERROR(SyntaxError)
CQED_DEFINE_ERROR(ValueError)
CQED_DEFINE_ERROR(TopologyError)
CQED_DEFINE_ERROR(UnsupportedTopology)
CQED_DEFINE_ERROR(PoleError)
CQED_DEFINE_ERROR(TruncationError)
CQED_DEFINE_ERROR(DimensionMismatch)
CQED_DEFINE_ERROR(DimensionError)
CQED_DEFINE_ERROR(ConvergenceFailure)
CQED_DEFINE_ERROR(InstabilityError)
CQED_DEFINE_ERROR(RegimeError)
CQED_DEFINE_ERROR(PullInError)
CQED_DEFINE_ERROR(SingularLiouvillian)
CQED_DEFINE_ERROR(PeriodNotFound)
CQED_DEFINE_ERROR(NoFeasiblePoint)
CQED_DEFINE_ERROR(NonConvergence)

#undef CQED_DEFINE_ERROR

}  // namespace cqed
