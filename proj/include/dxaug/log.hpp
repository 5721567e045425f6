#pragma once

#include <functional>
#include <string>

namespace dxaug {

// Non-fatal diagnostics. Defaults to stderr; tests may capture or mute.
using WarnSink = std::function<void(const std::string&)>;

void set_warn_sink(WarnSink sink);
void warn(const std::string& message);

}  // namespace dxaug
