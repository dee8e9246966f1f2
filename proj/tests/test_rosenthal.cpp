#include <doctest.h>

#include <cmath>
#include <numbers>

#include "printmap/rosenthal.hpp"
#include "rosenthal_oracle.hpp"
#include "test_support.hpp"

using namespace printmap;

namespace {

RosenthalParams example_params() {
  RosenthalParams p;
  p.absorbed_power = 0.35 * 200.0;
  p.scan_speed = 0.8;
  p.thermal_conductivity = 20.0;
  p.thermal_diffusivity = 5e-6;
  p.plate_temperature = 300.0;
  p.reference_temperature = 1700.0;
  return p;
}

RosenthalParams random_params(std::mt19937_64& gen) {
  std::uniform_real_distribution<double> power(100.0, 300.0), eps(0.25, 0.4), speed(0.3, 1.5),
      k(15.0, 30.0), alpha(3e-6, 8e-6), dt(1200.0, 1600.0);
  RosenthalParams p;
  p.absorbed_power = power(gen) * eps(gen);
  p.scan_speed = speed(gen);
  p.thermal_conductivity = k(gen);
  p.thermal_diffusivity = alpha(gen);
  p.plate_temperature = 298.15;
  p.reference_temperature = p.plate_temperature + dt(gen);
  return p;
}

}  // namespace

TEST_CASE("thermal diffusivity") {
  CHECK(thermal_diffusivity(20, 8000, 500) == doctest::Approx(5.0e-6).epsilon(1e-15));
  CHECK(thermal_diffusivity(40, 8000, 500) == doctest::Approx(2 * thermal_diffusivity(20, 8000, 500)));
  CHECK(thermal_diffusivity(16.2, 7990, 500) == doctest::Approx(4.0551e-6).epsilon(1e-4));
  CHECK(test::error_kind([] { thermal_diffusivity(0, 8000, 500); }) == "NonPositiveInput");
  CHECK(test::error_kind([] { thermal_diffusivity(20, -1, 500); }) == "NonPositiveInput");
}

TEST_CASE("Rosenthal temperature on the axis behind the source") {
  RosenthalParams p = example_params();
  p.absorbed_power = 80.0;
  p.plate_temperature = 298.0;
  CHECK(rosenthal_temperature(1e-4, 0.0, p) == doctest::Approx(6664.1977).epsilon(1e-8));
}

TEST_CASE("Rosenthal temperature decays to the plate temperature far away") {
  const RosenthalParams p = example_params();
  CHECK(rosenthal_temperature(1.0, 1.0, p) == doctest::Approx(p.plate_temperature).epsilon(1e-12));
  CHECK(rosenthal_temperature(1e3, 0.0, p) - p.plate_temperature < 1e-2);
}

TEST_CASE("Rosenthal temperature is singular at the source") {
  CHECK(test::error_kind([] { rosenthal_temperature(0.0, 0.0, example_params()); }) ==
        "OriginSingularity");
}

TEST_CASE("trailing length closed form") {
  RosenthalParams p = example_params();
  p.absorbed_power = 0.4 * 200.0;
  CHECK(trailing_length(p) == doctest::Approx(4.547284088e-4).epsilon(1e-9));

  RosenthalParams doubled = p;
  doubled.absorbed_power *= 2;
  CHECK(trailing_length(doubled) == doctest::Approx(2 * trailing_length(p)).epsilon(1e-15));

  RosenthalParams moved = p;
  moved.scan_speed = 0.123;
  moved.thermal_diffusivity = 9.9e-6;
  CHECK(trailing_length(moved) == trailing_length(p));
}

TEST_CASE("trailing length needs a positive temperature rise") {
  RosenthalParams p = example_params();
  p.reference_temperature = p.plate_temperature;
  CHECK(test::error_kind([&] { trailing_length(p); }) == "NonPositiveDeltaT");
  CHECK(test::error_kind([&] { meltpool_dimensions(p); }) == "NonPositiveDeltaT");
}

TEST_CASE("setting z = R in the isotherm equation recovers the trailing length") {
  auto gen = test::rng(31);
  for (int i = 0; i < 10; ++i) {
    const RosenthalParams p = random_params(gen);
    const double tail = trailing_length(p);
    const double z = isotherm_axial_position(tail, p);
    CHECK(std::abs(z - tail) / tail < 1e-10);
    // The logarithm's argument is exactly one at the tail.
    const double ratio = 2 * std::numbers::pi * p.thermal_conductivity * tail * p.delta_t() / p.absorbed_power;
    CHECK(std::abs(ratio - 1.0) < 1e-12);
  }
}

TEST_CASE("melt pool example against the frozen dense-grid oracle") {
  const MeltPoolDimensions d = meltpool_dimensions(example_params());
  // Dense-grid isotherm extent at 0.5 um resolution, computed offline.
  const double oracle_width = 118.0e-6;
  CHECK(std::abs(d.width - oracle_width) <= std::max(2e-6, 0.02 * oracle_width));
  CHECK(std::abs(d.depth - oracle_width / 2) <= std::max(2e-6, 0.02 * oracle_width / 2));
  CHECK(d.width > 20e-6);
  CHECK(d.width < 400e-6);
  CHECK(d.width == 2 * d.depth);
  CHECK(d.trailing_length == doctest::Approx(3.97887358e-4).epsilon(1e-8));
  // Regression values of the 1 um sweep.
  CHECK(d.width == doctest::Approx(118.572e-6).epsilon(1e-4));
  CHECK(d.length == doctest::Approx(415.27e-6).epsilon(1e-4));
}

TEST_CASE("melt pool vanishes below one sweep step") {
  RosenthalParams p = example_params();
  p.absorbed_power = 1e-3;
  CHECK(test::error_kind([&] { meltpool_dimensions(p); }) == "MeltPoolVanishes");
}

TEST_CASE("melt pool rejects non-positive parameters") {
  RosenthalParams p = example_params();
  p.scan_speed = 0;
  CHECK(test::error_kind([&] { meltpool_dimensions(p); }) == "NonPositiveInput");
  p = example_params();
  p.sweep_step = -1e-6;
  CHECK(test::error_kind([&] { meltpool_dimensions(p); }) == "NonPositiveInput");
}

TEST_CASE("sweep agrees with the dense-grid oracle on random parameters") {
  auto gen = test::rng(41);
  for (int i = 0; i < 6; ++i) {
    const RosenthalParams p = random_params(gen);
    const MeltPoolDimensions d = meltpool_dimensions(p);
    const double oracle = oracle::dense_grid_width(p, 0.5e-6);
    CAPTURE(i);
    CAPTURE(d.width);
    CAPTURE(oracle);
    CHECK(std::abs(d.width - oracle) <= std::max(2 * p.sweep_step, 0.02 * oracle));
    CHECK(std::abs(d.depth - oracle / 2) <= std::max(2 * p.sweep_step, 0.02 * oracle / 2));
  }
}

TEST_CASE("width is exactly twice the depth and all dimensions are finite") {
  auto gen = test::rng(42);
  for (int i = 0; i < 50; ++i) {
    const MeltPoolDimensions d = meltpool_dimensions(random_params(gen));
    CHECK(d.width == 2 * d.depth);
    CHECK(std::isfinite(d.length));
    CHECK(d.length >= 0);
    CHECK(d.trailing_length >= 0);
  }
}

TEST_CASE("boundary points sit on the isotherm and never beyond the trailing length") {
  auto gen = test::rng(43);
  for (int i = 0; i < 10; ++i) {
    const RosenthalParams p = random_params(gen);
    const double tail = trailing_length(p);
    int on_boundary = 0;
    for (int k = 1; k * p.sweep_step < tail; ++k) {
      const double radius = k * p.sweep_step;
      const double z = isotherm_axial_position(radius, p);
      if (radius * radius < z * z) continue;
      ++on_boundary;
      const double r = std::sqrt(radius * radius - z * z);
      CHECK(rosenthal_temperature(z, r, p) == doctest::Approx(p.reference_temperature).epsilon(1e-9));
      CHECK(radius <= tail);
    }
    CHECK(on_boundary > 0);
    // Beyond the tail the isotherm has no point.
    const double beyond = tail * 1.01;
    const double zb = isotherm_axial_position(beyond, p);
    CHECK(zb > beyond);
  }
}

TEST_CASE("melt pool grows with power and shrinks with speed") {
  RosenthalParams base = example_params();
  base.reference_temperature = 1690.5;
  base.plate_temperature = 298.15;
  base.thermal_conductivity = 16.2;
  base.thermal_diffusivity = thermal_diffusivity(16.2, 7990, 500);
  std::vector<std::vector<MeltPoolDimensions>> grid(10);
  for (int i = 0; i < 10; ++i) {
    for (int j = 0; j < 10; ++j) {
      RosenthalParams p = base;
      p.absorbed_power = 0.26 * 100.0 * (i + 1);
      p.scan_speed = 0.1 * (j + 1);
      grid[i].push_back(meltpool_dimensions(p));
    }
  }
  int violations = 0;
  for (int i = 0; i < 10; ++i) {
    for (int j = 0; j < 10; ++j) {
      if (i > 0 && grid[i][j].width < grid[i - 1][j].width) ++violations;
      if (j > 0 && grid[i][j].width > grid[i][j - 1].width) ++violations;
    }
  }
  CHECK(violations == 0);
}

TEST_CASE("sweep is independent of evaluation order") {
  const RosenthalParams p = example_params();
  const MeltPoolDimensions a = meltpool_dimensions(p);
  const MeltPoolDimensions b = meltpool_dimensions(p);
  CHECK(a.width == b.width);
  CHECK(a.length == b.length);
}
