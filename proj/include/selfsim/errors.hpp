#pragma once

#include <stdexcept>
#include <string>

namespace selfsim {

// Base of every error raised by the library. The CLI maps ResourceError to
// exit status 3 and everything else derived from Error to status 1.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

#define SELFSIM_DEFINE_ERROR(Name)                                               \
    class Name : public Error {                                                  \
    public:                                                                      \
        explicit Name(const std::string& what) : Error(#Name ": " + what) {}     \
    }

SELFSIM_DEFINE_ERROR(InvalidWordError);
SELFSIM_DEFINE_ERROR(DomainError);
SELFSIM_DEFINE_ERROR(InvalidGeometryError);
SELFSIM_DEFINE_ERROR(ResourceError);
SELFSIM_DEFINE_ERROR(UnsupportedSystemError);
SELFSIM_DEFINE_ERROR(LevelMismatchError);
SELFSIM_DEFINE_ERROR(ParameterError);
SELFSIM_DEFINE_ERROR(EmptySearchError);
SELFSIM_DEFINE_ERROR(InvariantViolationError);
SELFSIM_DEFINE_ERROR(ResolutionError);
SELFSIM_DEFINE_ERROR(DegenerateMeasureError);

#undef SELFSIM_DEFINE_ERROR

} // namespace selfsim
