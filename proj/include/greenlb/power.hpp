#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <optional>
#include <string_view>

namespace greenlb {

using Seconds = double;
using Watts = double;

inline constexpr Seconds kNever = std::numeric_limits<Seconds>::infinity();

/// Exactly one of these holds for a server at any instant.
enum class PowerState : std::uint8_t { On, Sleep, Suspend, Wakeup };

inline constexpr std::array<PowerState, 4> kAllPowerStates = {
    PowerState::On, PowerState::Sleep, PowerState::Suspend, PowerState::Wakeup};

constexpr std::size_t index_of(PowerState s) noexcept { return static_cast<std::size_t>(s); }

std::string_view to_string(PowerState s) noexcept;
std::optional<PowerState> parse_power_state(std::string_view text) noexcept;

/// Per-state power draw and transition timing shared by all servers.
struct PowerModel {
  Watts p_on = 200.0;
  Watts p_sleep = 14.0;
  Watts p_suspend = 200.0;
  Watts p_wakeup = 200.0;
  Seconds t_suspend = 10.0;
  Seconds t_wakeup = 10.0;
  /// Idle time in On before suspending. `kNever` keeps servers on forever.
  Seconds timeout = 10.0;

  friend bool operator==(const PowerModel&, const PowerModel&) = default;
};

/// Throws ConfigError on negative or NaN entries.
void validate(const PowerModel& model);

constexpr Watts power_of(PowerState s, const PowerModel& m) noexcept {
  switch (s) {
    case PowerState::On: return m.p_on;
    case PowerState::Sleep: return m.p_sleep;
    case PowerState::Suspend: return m.p_suspend;
    case PowerState::Wakeup: return m.p_wakeup;
  }
  return m.p_on;
}

constexpr Watts max_state_power(const PowerModel& m) noexcept {
  Watts w = m.p_on;
  if (m.p_suspend > w) w = m.p_suspend;
  if (m.p_wakeup > w) w = m.p_wakeup;
  if (m.p_sleep > w) w = m.p_sleep;
  return w;
}

}  // namespace greenlb
