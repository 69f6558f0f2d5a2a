#include "singvecm/errors.hpp"

#include <iostream>
#include <mutex>
#include <utility>

namespace singvecm {

namespace {
std::mutex warn_mutex;
WarnHook warn_hook;  // empty means stderr
}  // namespace

void warn(const std::string& msg) {
  std::lock_guard<std::mutex> lock(warn_mutex);
  if (warn_hook) {
    warn_hook(msg);
  } else {
    std::cerr << "warning: " << msg << '\n';
  }
}

WarnHook set_warn_hook(WarnHook hook) {
  std::lock_guard<std::mutex> lock(warn_mutex);
  std::swap(warn_hook, hook);
  return hook;
}

}  // namespace singvecm
