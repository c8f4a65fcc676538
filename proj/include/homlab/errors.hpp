#pragma once

#include <stdexcept>
#include <cstddef>
#include <string>

namespace homlab {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define HOMLAB_DEFINE_ERROR(Name)          \
  class Name : public Error {              \
   public:                                 \
    using Error::Error;                    \
  }

// group-core
HOMLAB_DEFINE_ERROR(MalformedSpec);
HOMLAB_DEFINE_ERROR(GradingViolation);
HOMLAB_DEFINE_ERROR(JacobiViolation);
HOMLAB_DEFINE_ERROR(DimensionMismatch);
HOMLAB_DEFINE_ERROR(UnsupportedStep);
HOMLAB_DEFINE_ERROR(NonpositiveLambda);

// norms / gsets
HOMLAB_DEFINE_ERROR(GroupMismatch);
HOMLAB_DEFINE_ERROR(XiOutOfRange);
HOMLAB_DEFINE_ERROR(EmptyRegion);
HOMLAB_DEFINE_ERROR(Infeasible);
HOMLAB_DEFINE_ERROR(ViolationFound);

// measures / rectify
HOMLAB_DEFINE_ERROR(PreconditionFailed);
HOMLAB_DEFINE_ERROR(TooLarge);
HOMLAB_DEFINE_ERROR(ResolutionTooCoarse);

#undef HOMLAB_DEFINE_ERROR

/// Raised when two chart candidates violate the cone condition; carries the
/// offending pair (indices into the caller's point list).
class ConeViolation : public Error {
 public:
  ConeViolation(const std::string& what, std::size_t first, std::size_t second)
      : Error(what), first_(first), second_(second) {}
  std::size_t first() const noexcept { return first_; }
  std::size_t second() const noexcept { return second_; }

 private:
  std::size_t first_;
  std::size_t second_;
};

}  // namespace homlab
