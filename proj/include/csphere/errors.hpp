#pragma once

#include <stdexcept>
#include <string>

namespace csphere {

// Base class for all library errors. The CLI maps subtypes to stable exit codes
// (see tools/charge_sphere_cli.cpp and --help).
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

#define CSPHERE_DEFINE_ERROR(Name)                                \
  class Name : public Error {                                     \
   public:                                                        \
    explicit Name(const std::string& msg) : Error(msg) {}         \
  }

CSPHERE_DEFINE_ERROR(NorthPoleError);
CSPHERE_DEFINE_ERROR(SingularFieldError);
CSPHERE_DEFINE_ERROR(SingularPotentialError);
CSPHERE_DEFINE_ERROR(InvalidIntensityError);
CSPHERE_DEFINE_ERROR(NearPoleError);
CSPHERE_DEFINE_ERROR(PoleOfSError);
CSPHERE_DEFINE_ERROR(ResidueMismatchError);
CSPHERE_DEFINE_ERROR(RootCountMismatchError);
CSPHERE_DEFINE_ERROR(NodeOutsideDomainError);
CSPHERE_DEFINE_ERROR(MassOverflowError);
CSPHERE_DEFINE_ERROR(UnsupportedTopologyError);
CSPHERE_DEFINE_ERROR(InvalidResultError);
CSPHERE_DEFINE_ERROR(CollisionError);
CSPHERE_DEFINE_ERROR(TestPointInsideDomainError);
CSPHERE_DEFINE_ERROR(SerializationError);
CSPHERE_DEFINE_ERROR(IoError);

#undef CSPHERE_DEFINE_ERROR

// Carries the best residual reached when an iterative solve gives up.
class NoConvergenceError : public Error {
 public:
  NoConvergenceError(const std::string& msg, double final_residual)
      : Error(msg + " (final residual " + std::to_string(final_residual) + ")"),
        final_residual_(final_residual) {}
  double final_residual() const { return final_residual_; }

 private:
  double final_residual_;
};

}  // namespace csphere
