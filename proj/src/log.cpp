#include "dxaug/log.hpp"

#include <iostream>
#include <mutex>

namespace dxaug {

namespace {
std::mutex sink_mutex;
WarnSink& sink() {
  static WarnSink s = [](const std::string& m) {
    std::cerr << "WARNING: " << m << '\n';
  };
  return s;
}
}  // namespace

void set_warn_sink(WarnSink s) {
  std::lock_guard lock(sink_mutex);
  sink() = std::move(s);
}

void warn(const std::string& message) {
  std::lock_guard lock(sink_mutex);
  if (sink()) sink()(message);
}

}  // namespace dxaug
