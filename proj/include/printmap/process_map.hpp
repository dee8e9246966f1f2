#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "printmap/properties.hpp"
#include "printmap/rosenthal.hpp"
#include "printmap/workspace.hpp"

namespace printmap {

/// Process parameters for one build, SI units.
struct BuildConfig {
  static constexpr int kSchemaVersion = 1;

  double beam_power = 0.0;         // W
  double scan_velocity = 0.0;      // m/s
  double hatch_spacing = 50e-6;    // m
  double layer_height = 30e-6;     // m
  double plate_temperature = 298.15;  // K

  /// Throws NonPositiveInput.
  void validate() const;
  bool operator==(const BuildConfig&) const = default;
};

json build_config_to_json(const BuildConfig& config);
BuildConfig build_config_from_json(const json& j);

struct LofEvaluation {
  double metric = 0.0;
  bool lack_of_fusion = false;
};

/// (hatch / width)^2 + (layer / depth)^2; lack of fusion when the metric
/// exceeds 1 (exactly 1 is printable). Throws ZeroMeltPoolDimension for a
/// non-positive width or depth, NonPositiveInput for negative hatch/layer.
LofEvaluation lof_criterion(double hatch, double width, double layer, double depth);

enum class Isotherm { Melting, Liquidus, Solidus };

std::string_view to_string(Isotherm isotherm) noexcept;
Isotherm parse_isotherm(std::string_view text);

/// Power/velocity grid and the three layer-height offsets evaluated per run.
struct ProcessMapConfig {
  std::vector<double> power_range;     // W
  std::vector<double> velocity_range;  // m/s
  std::array<double, 3> layer_height_offsets = {-25e-6, 0.0, 25e-6};  // m
  double sweep_step = 1e-6;            // m
  Isotherm isotherm = Isotherm::Melting;

  /// 100..1000 W and 0.1..1.0 m/s, both in ten steps.
  static ProcessMapConfig defaults();

  /// Throws InvalidRange.
  void validate() const;
  bool operator==(const ProcessMapConfig&) const = default;
};

/// The document written by `init_process_map`: which material and build to
/// combine, and the grid to sweep.
struct ProcessMapPlan {
  static constexpr int kSchemaVersion = 1;

  std::string run_id;
  DocumentRef material_ref;
  DocumentRef build_ref;
  ProcessMapConfig config;

  bool operator==(const ProcessMapPlan&) const = default;
};

json process_map_plan_to_json(const ProcessMapPlan& plan);
ProcessMapPlan process_map_plan_from_json(const json& j);

struct ParameterPoint {
  double power_w = 0.0;
  double velocity_mm_s = 0.0;
  bool operator==(const ParameterPoint&) const = default;
};

struct ProcessMapCell {
  double power_w = 0.0;
  double velocity_mm_s = 0.0;
  double lof_metric = 0.0;  // +inf when the melt pool could not be computed
  bool lack_of_fusion = false;
  double melt_width_um = 0.0;
  double melt_depth_um = 0.0;
  double melt_length_um = 0.0;
  std::optional<std::string> error;

  bool operator==(const ProcessMapCell&) const = default;
};

struct LayerVariant {
  double layer_offset_um = 0.0;
  double layer_height_um = 0.0;
  bool clamped = false;
  std::vector<ProcessMapCell> cells;  // power-major, velocity-minor
  std::vector<ParameterPoint> lack_of_fusion;
  std::vector<ParameterPoint> printable;

  bool operator==(const LayerVariant&) const = default;
};

struct ProcessMapResult {
  static constexpr int kSchemaVersion = 1;

  std::string run_id;
  std::string material_ref;
  std::string build_ref;
  std::string config_ref;
  std::string material_name;
  double hatch_spacing_um = 0.0;
  double prescribed_layer_height_um = 0.0;
  Isotherm isotherm = Isotherm::Melting;
  std::vector<double> power_range_w;
  std::vector<double> velocity_range_mm_s;
  std::vector<LayerVariant> variants;

  bool operator==(const ProcessMapResult&) const = default;
};

json process_map_result_to_json(const ProcessMapResult& result);
ProcessMapResult process_map_result_from_json(const json& j);

/// Labelled-key digest: per layer height, the lack-of-fusion and printable
/// (power_w, velocity_mm_s) points.
json process_map_summary(const ProcessMapResult& result);

/// Rosenthal inputs for one (power, velocity) cell; absorbed power is
/// absorptivity times beam power.
RosenthalParams rosenthal_params_for(const Material& material, double beam_power,
                                     double scan_velocity, double plate_temperature,
                                     double sweep_step = 1e-6,
                                     Isotherm isotherm = Isotherm::Melting);

/// Evaluates every cell of every layer variant. Pure; no workspace access.
ProcessMapResult compute_process_map(const Material& material, const BuildConfig& build,
                                     const ProcessMapConfig& config);

// Workspace-backed operations. Mutating calls take the workspace writer lock.

struct ProcessMapOverrides {
  std::optional<std::vector<double>> power_range;     // W
  std::optional<std::vector<double>> velocity_range;  // m/s
  std::optional<double> sweep_step;
  std::optional<Isotherm> isotherm;
  std::optional<std::string> run_name;
};

/// Writes process_maps/<run>/config.json and returns its reference.
DocumentRef init_process_map(WorkspaceStore& store, std::string_view workspace,
                             const DocumentRef& build_ref, const DocumentRef& material_ref,
                             const ProcessMapOverrides& overrides = {});

/// Writes process_maps/<run>/result.json next to the config.
DocumentRef generate_process_map(WorkspaceStore& store, const DocumentRef& config_ref);

/// SVG with one panel per layer height, velocity (mm/s) on x, power (W) on y.
std::string render_process_map_svg(const ProcessMapResult& result);

/// Writes the figure; an empty `output_path` puts it next to the result as
/// process_map.svg. Throws UnwritablePath.
std::filesystem::path render_process_map(const WorkspaceStore& store,
                                         const DocumentRef& result_ref,
                                         const std::filesystem::path& output_path = {});

}  // namespace printmap
