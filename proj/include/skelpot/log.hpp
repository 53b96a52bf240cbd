#ifndef SKELPOT_LOG_HPP
#define SKELPOT_LOG_HPP

#include <functional>
#include <string>

namespace skelpot {

using WarningSink = std::function<void(const std::string&)>;

// Replaces the warning sink; an empty sink silences warnings. Returns the
// previous sink. The default writes to stderr.
WarningSink set_warning_sink(WarningSink sink);
void warn(const std::string& message);

}  // namespace skelpot

#endif
