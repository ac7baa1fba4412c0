#pragma once

#include <stdexcept>
#include <string>

namespace minplan {

// Error taxonomy shared by the C++ core and the C API layer (which maps the
// codes 1:1 onto minplan_status values).
enum class errc {
  invalid_argument = 1,  // bad call-site values: dimensions, ranges, empty sequences
  domain = 2,            // model violates a documented precondition (negative cost, ...)
  numeric_overflow = 3,  // non-finite state or cost produced while stepping/planning
  integer_overflow = 4,  // certificate arithmetic exceeded the wide-integer range
  divergence = 5,        // bound iteration grew past the overflow guard
  infeasible = 6,        // no horizon can satisfy the decay condition at this gamma*
  inversion_range = 7,   // bisection could not bracket the requested value
  resource_limit = 8,    // enumeration size above the configured cap
  fit_failure = 9,       // envelope fit has no positive decay to work with
  config = 10,           // config file rejected (unknown key, missing field, bad type)
  io = 11,               // filesystem failure while writing an artifact
  internal = 12,         // invariant breach inside the library itself
};

const char* errc_name(errc code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
  errc code() const noexcept { return code_; }

 private:
  errc code_;
};

[[noreturn]] inline void fail(errc code, const std::string& what) { throw Error(code, what); }

}  // namespace minplan
