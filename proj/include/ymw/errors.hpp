#pragma once

#include <stdexcept>
#include <string>

namespace ymw {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SingularMatrix : Error {
  using Error::Error;
};

struct SingularPoint : Error {
  using Error::Error;
};

struct OriginSingularity : Error {
  using Error::Error;
};

struct DegenerateInput : Error {
  using Error::Error;
};

struct ContinuationStall : Error {
  using Error::Error;
};

struct RankLoss : Error {
  using Error::Error;
};

struct IllConditionedFit : Error {
  using Error::Error;
};

struct StepUnstable : Error {
  using Error::Error;
};

struct ConfigError : Error {
  using Error::Error;
};

}  // namespace ymw
