#pragma once

namespace drlab::env {

struct BatteryState {
  double soc = 0.0;                   // stored energy fraction in [0, 1]
  double capacity_kwh = 6.4;
  double nominal_power_kw = 5.0;
  double round_trip_efficiency = 0.9; // in (0, 1]
};

struct BatteryStepResult {
  BatteryState next;
  double grid_energy_kwh = 0.0;  // energy the grid sees: + while charging, - while discharging
  double cell_energy_delta_kwh = 0.0;
};

/// One-hour linear dispatch. The request a * capacity is clamped by
/// nominal power and by headroom (charge) or stored energy (discharge);
/// sqrt(round-trip efficiency) is lost on each direction.
BatteryStepResult battery_step(const BatteryState& state, double action);

}  // namespace drlab::env
