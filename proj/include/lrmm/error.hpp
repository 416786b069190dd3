#pragma once

#include <stdexcept>
#include <string>

namespace lrmm {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define LRMM_DECLARE_ERROR(Name)          \
  class Name : public Error {             \
   public:                                \
    using Error::Error;                   \
  }

LRMM_DECLARE_ERROR(DimensionError);
LRMM_DECLARE_ERROR(DegenerateSpectrum);
LRMM_DECLARE_ERROR(MissingLabels);
LRMM_DECLARE_ERROR(TooFewSamples);
LRMM_DECLARE_ERROR(NonFinite);
LRMM_DECLARE_ERROR(BruteForceTooLarge);
LRMM_DECLARE_ERROR(InsufficientPoints);
LRMM_DECLARE_ERROR(ParseError);
LRMM_DECLARE_ERROR(IndexOutOfRange);
LRMM_DECLARE_ERROR(EmptyStack);
LRMM_DECLARE_ERROR(LabelMismatch);
LRMM_DECLARE_ERROR(IoError);

#undef LRMM_DECLARE_ERROR

}  // namespace lrmm
