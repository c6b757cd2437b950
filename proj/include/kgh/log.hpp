#pragma once

#include <string>
#include <vector>

namespace kgh {

// Warnings go to stderr (unless silenced) and are kept so run summaries can
// list them.
void warn(const std::string& message);
std::vector<std::string> drain_warnings();
void set_warnings_quiet(bool quiet);

}  // namespace kgh
