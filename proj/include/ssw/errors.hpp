#pragma once

#include <stdexcept>
#include <string>

namespace ssw {

class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& what)
      : std::runtime_error(kind + ": " + what), kind_(std::move(kind)) {}
  const std::string& kind() const { return kind_; }

 private:
  std::string kind_;
};

#define SSW_DEFINE_ERROR(Name)                                     \
  class Name : public Error {                                      \
   public:                                                         \
    explicit Name(const std::string& what) : Error(#Name, what) {} \
  };

SSW_DEFINE_ERROR(NoGroundState)
SSW_DEFINE_ERROR(GridTooSmall)
SSW_DEFINE_ERROR(DegenerateKernel)
SSW_DEFINE_ERROR(EigSolverFailure)
SSW_DEFINE_ERROR(VolterraDivergence)
SSW_DEFINE_ERROR(XiZeroSingular)
SSW_DEFINE_ERROR(NearSingularD)
SSW_DEFINE_ERROR(ExtrapolationUnstable)
SSW_DEFINE_ERROR(NewtonDivergence)
SSW_DEFINE_ERROR(SingularM)
SSW_DEFINE_ERROR(BlowupDetected)
SSW_DEFINE_ERROR(WindowTooShort)
SSW_DEFINE_ERROR(PhaseUnwrapFailure)
SSW_DEFINE_ERROR(QuadratureUnderResolved)
SSW_DEFINE_ERROR(ConfigParse)
SSW_DEFINE_ERROR(InvariantFailure)

#undef SSW_DEFINE_ERROR

}  // namespace ssw
