#pragma once

#include "printmap/error.hpp"

namespace printmap {

/// Inputs to the moving point-source conduction solution, SI units.
struct RosenthalParams {
  double absorbed_power = 0.0;        // Q = absorptivity * beam power, W
  double scan_speed = 0.0;            // V, m/s
  double thermal_conductivity = 0.0;  // k, W/(m K)
  double thermal_diffusivity = 0.0;   // alpha, m^2/s
  double plate_temperature = 298.15;  // T_inf, K
  double reference_temperature = 0.0; // isotherm traced as the melt-pool boundary, K
  double sweep_step = 1e-6;           // m

  double delta_t() const noexcept { return reference_temperature - plate_temperature; }

  /// Throws NonPositiveInput, or NonPositiveDeltaT when the isotherm is not
  /// above the plate temperature.
  void validate() const;
};

struct MeltPoolDimensions {
  double width = 0.0;            // m, twice the largest transverse radius
  double depth = 0.0;            // m, half the width
  double length = 0.0;           // m, front-to-tail extent along the scan axis
  double trailing_length = 0.0;  // m, on-axis distance behind the source

  bool operator==(const MeltPoolDimensions&) const = default;
};

/// alpha = k / (rho c_p). Throws NonPositiveInput.
double thermal_diffusivity(double thermal_conductivity, double density, double specific_heat);

/// T = T_inf + Q / (2 pi k R) exp(V (z - R) / (2 alpha)), R = sqrt(z^2 + r^2).
/// z runs along the scan axis, positive behind the source. Throws
/// OriginSingularity at R = 0.
double rosenthal_temperature(double z, double r, const RosenthalParams& params);

/// Axial position of the isotherm on the sphere of radius R:
/// z(R) = R + (2 alpha / V) ln(2 pi k R dT / Q).
double isotherm_axial_position(double radius, const RosenthalParams& params);

/// Q / (2 pi k dT): the radius at which the isotherm meets the axis behind
/// the source. Independent of scan speed and diffusivity. Throws
/// NonPositiveDeltaT.
double trailing_length(const RosenthalParams& params);

/// Sweeps R from one step up to the trailing length (inclusive) and traces
/// the isotherm boundary, r(R) = sqrt(R^2 - z(R)^2) wherever R^2 >= z^2.
/// Throws MeltPoolVanishes when the trailing length is below one step or no
/// sweep point has a positive transverse radius.
MeltPoolDimensions meltpool_dimensions(const RosenthalParams& params);

}  // namespace printmap
