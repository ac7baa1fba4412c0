#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace minplan {

// Shortest round-trip decimal for a double (17 significant digits).
std::string format_double(double v);

std::string join(const std::vector<std::string>& parts, char sep);

// Reproducibility header written at the top of every artifact: the tool
// version and the fully resolved config, each on a '#' comment line.
void write_artifact_header(std::ostream& os, const std::string& resolved_config_json);

}  // namespace minplan
