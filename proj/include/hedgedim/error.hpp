#pragma once

#include <stdexcept>
#include <string>

namespace hedgedim {

enum class ErrorKind {
  RationalTermination,
  PrecisionExhausted,
  Overflow,
  DepthInsufficient,
  BrjunoUndetermined,
  EpsMismatch,
  LogPrecisionLoss,
  InequalityViolated,
  DegenerateDiameter,
  ChildlessParent,
  EmptyInput,
  FewerThanTwoScales,
  PoleAt,
  BranchUndefined,
  BranchLoss,
  NotNearTranslation,
  ResidualExceedsTol,
  NewtonDiverged,
  OutsideChart,
  AnchorUnreachable,
  NoReturnWithin,
  LeftChart,
  InvalidArgument,
  Parse,
};

const char* kind_name(ErrorKind k);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what, long index = -1)
      : std::runtime_error(what), kind_(kind), index_(index) {}

  ErrorKind kind() const { return kind_; }
  // level, generation or iteration count the error refers to; -1 when not applicable
  long index() const { return index_; }

 private:
  ErrorKind kind_;
  long index_;
};

}  // namespace hedgedim
