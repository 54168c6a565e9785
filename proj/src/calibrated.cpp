#include "grosc/config.hpp"

namespace grosc {

RunConfig calibrated_config() {
  RunConfig c;
  c.device.i_region_width = 565e-4;
  c.device.junction_area = 5e-5;
  c.device.load_resistance = 636.916;
  c.device.effective_permittivity = 8.76872e-11;

  auto& g = c.gr;
  g.trap_density = 1e12;
  g.ionization_prefactor = 4.01426e-3;
  g.critical_field = 584.012;
  g.thermal_quench_temperature = 14.0;
  g.thermal_quench_width = 0.15;
  g.capture_coefficient = 1.9727e-4;
  g.thermal_generation_prefactor = 1e12;
  g.optical_generation = 0.0;
  g.recombination_rate = 4e7;
  g.background_generation = 2.34996e16;
  g.trap_refill_rate = 1.90572e6;
  g.recombination_saturation = 3.25837e10;
  g.linear_recombination_rate = 4e5;
  g.optical_conversion = 2e20;
  g.reverse_leakage = 1e-9;
  g.field_floor = 1e-6;

  c.readout.capture_efficiency = 0.1;
  c.readout.capture_coefficient = 1e-9;
  c.readout.emitter_density = 1e14;
  c.readout.fast_lifetime = 522e-9;
  c.readout.slow_lifetime = 2.39e-6;
  c.readout.slow_fraction = 0.0;

  c.sync();
  return c;
}

}  // namespace grosc
