#include "core/csv.hpp"

#include <cstdio>

#include "core/version.hpp"

namespace minplan {

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string join(const std::vector<std::string>& parts, char sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i != 0) out.push_back(sep);
    out += parts[i];
  }
  return out;
}

void write_artifact_header(std::ostream& os, const std::string& resolved_config_json) {
  os << "# " << kVersionLine << "\n";
  os << "# config " << resolved_config_json << "\n";
}

}  // namespace minplan
