#include "kgh/log.hpp"

#include <iostream>
#include <mutex>

namespace kgh {

namespace {
std::mutex mutex;
std::vector<std::string> pending;
bool quiet = false;
}  // namespace

void warn(const std::string& message) {
  std::lock_guard lock(mutex);
  if (!quiet) std::cerr << "warning: " << message << '\n';
  pending.push_back(message);
}

std::vector<std::string> drain_warnings() {
  std::lock_guard lock(mutex);
  return std::exchange(pending, {});
}

void set_warnings_quiet(bool q) {
  std::lock_guard lock(mutex);
  quiet = q;
}

}  // namespace kgh
