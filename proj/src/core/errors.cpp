#include "core/errors.hpp"

namespace minplan {

const char* errc_name(errc code) noexcept {
  switch (code) {
    case errc::invalid_argument: return "invalid_argument";
    case errc::domain: return "domain";
    case errc::numeric_overflow: return "numeric_overflow";
    case errc::integer_overflow: return "integer_overflow";
    case errc::divergence: return "divergence";
    case errc::infeasible: return "infeasible";
    case errc::inversion_range: return "inversion_range";
    case errc::resource_limit: return "resource_limit";
    case errc::fit_failure: return "fit_failure";
    case errc::config: return "config";
    case errc::io: return "io";
    case errc::internal: return "internal";
  }
  return "unknown";
}

}  // namespace minplan
