#pragma once

#include <cmath>
#include <numbers>

#include "printmap/rosenthal.hpp"

// Independent melt-pool reference: evaluates the temperature field directly
// on a regular (z, r) grid and reports the widest molten column. Shares no
// code with the library sweep.
namespace oracle {

inline double temperature(double z, double r, const printmap::RosenthalParams& p) {
  const double radius = std::sqrt(z * z + r * r);
  return p.plate_temperature + p.absorbed_power / (2.0 * std::numbers::pi * p.thermal_conductivity * radius) *
                                   std::exp(p.scan_speed * (z - radius) / (2.0 * p.thermal_diffusivity));
}

/// Width (2 * max r) of the region at or above the reference temperature,
/// scanning z in [-3 Rt, Rt] and r in [0, Rt] with spacing `h`.
inline double dense_grid_width(const printmap::RosenthalParams& p, double h) {
  const double tail =
      p.absorbed_power / (2.0 * std::numbers::pi * p.thermal_conductivity *
                          (p.reference_temperature - p.plate_temperature));
  const long nz_lo = static_cast<long>(std::floor(-3.0 * tail / h));
  const long nz_hi = static_cast<long>(std::floor(tail / h));
  const long nr = static_cast<long>(std::floor(tail / h));
  for (long j = nr; j >= 1; --j) {
    const double r = j * h;
    for (long i = nz_lo; i <= nz_hi; ++i) {
      if (temperature(i * h, r, p) >= p.reference_temperature) return 2.0 * r;
    }
  }
  return 0.0;
}

}  // namespace oracle
