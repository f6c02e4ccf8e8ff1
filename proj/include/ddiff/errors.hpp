#ifndef DDIFF_ERRORS_HPP
#define DDIFF_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace ddiff {

// Base of every error raised by the library. `code()` is a stable,
// machine-readable tag used by the CLI in its JSON error reports.
class Error : public std::runtime_error
{
public:
  Error(std::string code, const std::string& what)
    : std::runtime_error(what), code_(std::move(code))
  {
  }

  const std::string& code() const noexcept { return code_; }

private:
  std::string code_;
};

#define DDIFF_DEFINE_ERROR(Name)                                        \
  class Name : public Error                                             \
  {                                                                     \
  public:                                                               \
    explicit Name(const std::string& what) : Error(#Name, what) {}      \
  };

DDIFF_DEFINE_ERROR(InvalidArgument)
DDIFF_DEFINE_ERROR(NonConvergence)
DDIFF_DEFINE_ERROR(TimestepUnderflow)
DDIFF_DEFINE_ERROR(MassMismatch)
DDIFF_DEFINE_ERROR(GridMismatch)
DDIFF_DEFINE_ERROR(NoRoot)
DDIFF_DEFINE_ERROR(DegenerateFront)
DDIFF_DEFINE_ERROR(FrontRetreat)
DDIFF_DEFINE_ERROR(Stalled)
DDIFF_DEFINE_ERROR(InsufficientData)
DDIFF_DEFINE_ERROR(NonPositiveValues)
DDIFF_DEFINE_ERROR(NonPositiveProfile)
DDIFF_DEFINE_ERROR(ConfigError)
DDIFF_DEFINE_ERROR(UnsupportedIC)
DDIFF_DEFINE_ERROR(InvariantViolation)
DDIFF_DEFINE_ERROR(FormatError)

#undef DDIFF_DEFINE_ERROR

} // namespace ddiff

#endif
