#pragma once

#include <stdexcept>
#include <string>

namespace millaccess {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define MILLACCESS_DEFINE_ERROR(Name)        \
  class Name : public Error {                \
   public:                                   \
    using Error::Error;                      \
  }

MILLACCESS_DEFINE_ERROR(ParseError);
MILLACCESS_DEFINE_ERROR(EmptyMesh);
MILLACCESS_DEFINE_ERROR(DegenerateBBox);
MILLACCESS_DEFINE_ERROR(IoError);
MILLACCESS_DEFINE_ERROR(InvalidCount);
MILLACCESS_DEFINE_ERROR(NotWatertight);
MILLACCESS_DEFINE_ERROR(EmptyInput);
MILLACCESS_DEFINE_ERROR(LengthMismatch);
MILLACCESS_DEFINE_ERROR(FormatError);
MILLACCESS_DEFINE_ERROR(EmptyInputDir);
MILLACCESS_DEFINE_ERROR(InvalidArgument);

#undef MILLACCESS_DEFINE_ERROR

}  // namespace millaccess
