#include "greenlb/power.hpp"

#include <cmath>
#include <string>

#include "greenlb/error.hpp"

namespace greenlb {

std::string_view to_string(PowerState s) noexcept {
  switch (s) {
    case PowerState::On: return "on";
    case PowerState::Sleep: return "sleep";
    case PowerState::Suspend: return "suspend";
    case PowerState::Wakeup: return "wakeup";
  }
  return "on";
}

std::optional<PowerState> parse_power_state(std::string_view text) noexcept {
  for (auto s : kAllPowerStates) {
    if (to_string(s) == text) return s;
  }
  return std::nullopt;
}

void validate(const PowerModel& m) {
  auto check = [](double v, const char* name) {
    if (std::isnan(v) || v < 0.0) {
      throw ConfigError(std::string("power.") + name + " must be non-negative");
    }
  };
  check(m.p_on, "p_on");
  check(m.p_sleep, "p_sleep");
  check(m.p_suspend, "p_suspend");
  check(m.p_wakeup, "p_wakeup");
  check(m.t_suspend, "t_suspend");
  check(m.t_wakeup, "t_wakeup");
  check(m.timeout, "timeout");
  if (std::isinf(m.t_suspend) || std::isinf(m.t_wakeup)) {
    throw ConfigError("power transition times must be finite");
  }
}

}  // namespace greenlb
