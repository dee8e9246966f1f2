#include "printmap/rosenthal.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace printmap {

namespace {

bool positive_finite(double v) { return std::isfinite(v) && v > 0.0; }

}  // namespace

void RosenthalParams::validate() const {
  if (!positive_finite(absorbed_power) || !positive_finite(scan_speed) ||
      !positive_finite(thermal_conductivity) || !positive_finite(thermal_diffusivity) ||
      !positive_finite(plate_temperature) || !positive_finite(reference_temperature) ||
      !positive_finite(sweep_step)) {
    throw Error(ErrorKind::NonPositiveInput, "Rosenthal parameters must all be finite and > 0");
  }
  if (!(delta_t() > 0.0)) {
    throw Error(ErrorKind::NonPositiveDeltaT,
                "isotherm temperature must exceed the plate temperature",
                {{"reference_temperature", reference_temperature},
                 {"plate_temperature", plate_temperature}});
  }
}

double thermal_diffusivity(double thermal_conductivity, double density, double specific_heat) {
  if (!positive_finite(thermal_conductivity) || !positive_finite(density) ||
      !positive_finite(specific_heat)) {
    throw Error(ErrorKind::NonPositiveInput, "k, density and specific heat must be > 0");
  }
  return thermal_conductivity / (density * specific_heat);
}

double rosenthal_temperature(double z, double r, const RosenthalParams& params) {
  const double radius = std::hypot(z, r);
  if (radius == 0.0) {
    throw Error(ErrorKind::OriginSingularity, "temperature is unbounded at the heat source");
  }
  const double amplitude =
      params.absorbed_power / (2.0 * std::numbers::pi * params.thermal_conductivity * radius);
  return params.plate_temperature +
         amplitude * std::exp(params.scan_speed * (z - radius) / (2.0 * params.thermal_diffusivity));
}

double isotherm_axial_position(double radius, const RosenthalParams& params) {
  const double ratio = 2.0 * std::numbers::pi * params.thermal_conductivity * radius *
                       params.delta_t() / params.absorbed_power;
  return radius + (2.0 * params.thermal_diffusivity / params.scan_speed) * std::log(ratio);
}

double trailing_length(const RosenthalParams& params) {
  if (!(params.delta_t() > 0.0)) {
    throw Error(ErrorKind::NonPositiveDeltaT,
                "isotherm temperature must exceed the plate temperature");
  }
  if (!positive_finite(params.absorbed_power) || !positive_finite(params.thermal_conductivity)) {
    throw Error(ErrorKind::NonPositiveInput, "absorbed power and conductivity must be > 0");
  }
  return params.absorbed_power /
         (2.0 * std::numbers::pi * params.thermal_conductivity * params.delta_t());
}

MeltPoolDimensions meltpool_dimensions(const RosenthalParams& params) {
  params.validate();
  const double tail = trailing_length(params);
  if (tail < params.sweep_step) {
    throw Error(ErrorKind::MeltPoolVanishes,
                "melt pool is smaller than one sweep step",
                {{"trailing_length", tail}, {"sweep_step", params.sweep_step}});
  }

  double max_radius = 0.0;
  double min_z = tail;  // the tail point (R = tail, z = tail) always lies on the boundary
  double max_z = tail;
  auto visit = [&](double radius) {
    const double z = isotherm_axial_position(radius, params);
    if (radius * radius < z * z) return;
    max_radius = std::max(max_radius, std::sqrt(radius * radius - z * z));
    min_z = std::min(min_z, z);
    max_z = std::max(max_z, z);
  };

  // Index-based radii avoid accumulating rounding in the step.
  const auto steps = static_cast<std::size_t>(std::floor(tail / params.sweep_step));
  for (std::size_t i = 1; i <= steps; ++i) {
    const double radius = static_cast<double>(i) * params.sweep_step;
    if (radius < tail) visit(radius);
  }

  if (!(max_radius > 0.0)) {
    throw Error(ErrorKind::MeltPoolVanishes, "no sweep point lies inside the melt pool",
                {{"trailing_length", tail}, {"sweep_step", params.sweep_step}});
  }

  MeltPoolDimensions dims;
  dims.depth = max_radius;
  dims.width = 2.0 * max_radius;
  dims.length = max_z - min_z;
  dims.trailing_length = tail;
  return dims;
}

}  // namespace printmap
