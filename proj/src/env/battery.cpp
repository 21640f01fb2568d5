#include "drlab/env/battery.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace drlab::env {

BatteryStepResult battery_step(const BatteryState& state, double action) {
  if (!(state.capacity_kwh > 0.0) || !(state.nominal_power_kw > 0.0))
    throw std::invalid_argument("battery capacity and nominal power must be positive");
  if (!(state.round_trip_efficiency > 0.0) || state.round_trip_efficiency > 1.0)
    throw std::invalid_argument("round-trip efficiency must be in (0, 1]");
  const double a = std::clamp(action, -1.0, 1.0);
  const double eta = std::sqrt(state.round_trip_efficiency);
  const double power_limit = state.nominal_power_kw * 1.0;  // one-hour step

  BatteryStepResult r;
  r.next = state;
  if (a > 0.0) {
    const double headroom = (1.0 - state.soc) * state.capacity_kwh;
    const double grid_in = std::min({a * state.capacity_kwh, power_limit, headroom});
    r.grid_energy_kwh = grid_in;
    r.cell_energy_delta_kwh = grid_in * eta;
  } else if (a < 0.0) {
    const double stored = state.soc * state.capacity_kwh;
    const double cell_out = std::min({-a * state.capacity_kwh, power_limit, stored});
    r.grid_energy_kwh = -cell_out * eta;
    r.cell_energy_delta_kwh = -cell_out;
  }
  r.next.soc = std::clamp(state.soc + r.cell_energy_delta_kwh / state.capacity_kwh, 0.0, 1.0);
  return r;
}

}  // namespace drlab::env
