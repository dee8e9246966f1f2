#include "printmap/process_map.hpp"

#include <cmath>
#include <limits>

namespace printmap {

namespace {

constexpr double kUm = 1e6;

bool positive_finite(double v) { return std::isfinite(v) && v > 0.0; }

double number_field(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key) || !j.at(key).is_number()) {
    throw Error(ErrorKind::InvalidDocument, std::string("missing numeric field '") + key + "'",
                {{"field", key}});
  }
  return j.at(key).get<double>();
}

std::vector<double> number_array(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key) || !j.at(key).is_array()) {
    throw Error(ErrorKind::InvalidDocument, std::string("missing array field '") + key + "'",
                {{"field", key}});
  }
  std::vector<double> out;
  for (const auto& v : j.at(key)) {
    if (!v.is_number()) {
      throw Error(ErrorKind::InvalidDocument, std::string("non-numeric entry in '") + key + "'");
    }
    out.push_back(v.get<double>());
  }
  return out;
}

void require_schema(const json& j, const char* schema) {
  const std::string found = j.is_object() ? j.value("schema", std::string{}) : std::string{};
  if (found != schema) {
    throw Error(ErrorKind::SchemaMismatch,
                std::string("expected a ") + schema + " document, found '" + found + "'",
                {{"expected", schema}, {"found", found}});
  }
}

// Labels are rounded so 0.7 m/s reads as 700 rather than 700.0000000000001.
double velocity_label(double velocity_m_s) {
  return std::round(velocity_m_s * 1e3 * 1e6) / 1e6;
}

void check_range(const std::vector<double>& values, const char* what) {
  if (values.empty()) {
    throw Error(ErrorKind::InvalidRange, std::string(what) + " must not be empty",
                {{"field", what}});
  }
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!positive_finite(values[i])) {
      throw Error(ErrorKind::InvalidRange, std::string(what) + " values must be positive",
                  {{"field", what}});
    }
    if (i > 0 && !(values[i] > values[i - 1])) {
      throw Error(ErrorKind::InvalidRange, std::string(what) + " must be strictly increasing",
                  {{"field", what}});
    }
  }
}

json points_to_json(const std::vector<ParameterPoint>& points) {
  json out = json::array();
  for (const auto& p : points) {
    out.push_back({{"power_w", p.power_w}, {"velocity_mm_s", p.velocity_mm_s}});
  }
  return out;
}

std::vector<ParameterPoint> points_from_json(const json& j) {
  std::vector<ParameterPoint> out;
  for (const auto& p : j) out.push_back({number_field(p, "power_w"), number_field(p, "velocity_mm_s")});
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// BuildConfig

void BuildConfig::validate() const {
  if (!positive_finite(beam_power) || !positive_finite(scan_velocity) ||
      !positive_finite(hatch_spacing) || !positive_finite(layer_height) ||
      !positive_finite(plate_temperature)) {
    throw Error(ErrorKind::NonPositiveInput, "build parameters must all be finite and > 0");
  }
}

json build_config_to_json(const BuildConfig& c) {
  return {{"schema", "build_config"},
          {"schema_version", BuildConfig::kSchemaVersion},
          {"beam_power_w", c.beam_power},
          {"scan_velocity_m_s", c.scan_velocity},
          {"hatch_spacing_m", c.hatch_spacing},
          {"layer_height_m", c.layer_height},
          {"plate_temperature_k", c.plate_temperature}};
}

BuildConfig build_config_from_json(const json& j) {
  require_schema(j, "build_config");
  BuildConfig c;
  c.beam_power = number_field(j, "beam_power_w");
  c.scan_velocity = number_field(j, "scan_velocity_m_s");
  c.hatch_spacing = j.contains("hatch_spacing_m") ? number_field(j, "hatch_spacing_m") : 50e-6;
  c.layer_height = number_field(j, "layer_height_m");
  c.plate_temperature =
      j.contains("plate_temperature_k") ? number_field(j, "plate_temperature_k") : 298.15;
  c.validate();
  return c;
}

// ---------------------------------------------------------------------------
// Criterion

LofEvaluation lof_criterion(double hatch, double width, double layer, double depth) {
  if (!(width > 0.0) || !(depth > 0.0)) {
    throw Error(ErrorKind::ZeroMeltPoolDimension, "melt pool width and depth must be > 0",
                {{"width", width}, {"depth", depth}});
  }
  if (!(hatch >= 0.0) || !(layer >= 0.0)) {
    throw Error(ErrorKind::NonPositiveInput, "hatch spacing and layer height must be >= 0");
  }
  const double h = hatch / width;
  const double l = layer / depth;
  const double metric = h * h + l * l;
  return {metric, metric > 1.0};
}

std::string_view to_string(Isotherm isotherm) noexcept {
  switch (isotherm) {
    case Isotherm::Melting: return "melting";
    case Isotherm::Liquidus: return "liquidus";
    case Isotherm::Solidus: return "solidus";
  }
  return "melting";
}

Isotherm parse_isotherm(std::string_view text) {
  if (text == "melting") return Isotherm::Melting;
  if (text == "liquidus") return Isotherm::Liquidus;
  if (text == "solidus") return Isotherm::Solidus;
  throw Error(ErrorKind::InvalidConfig,
              "isotherm must be melting, liquidus or solidus, got '" + std::string(text) + "'");
}

// ---------------------------------------------------------------------------
// Config and plan

ProcessMapConfig ProcessMapConfig::defaults() {
  ProcessMapConfig config;
  for (int i = 1; i <= 10; ++i) {
    config.power_range.push_back(100.0 * i);
    config.velocity_range.push_back(i / 10.0);
  }
  return config;
}

void ProcessMapConfig::validate() const {
  check_range(power_range, "power_range");
  check_range(velocity_range, "velocity_range");
  if (layer_height_offsets != ProcessMapConfig{}.layer_height_offsets) {
    throw Error(ErrorKind::InvalidRange, "layer height offsets are fixed at -25, 0, +25 um");
  }
  if (!positive_finite(sweep_step)) {
    throw Error(ErrorKind::InvalidRange, "sweep_step must be > 0");
  }
}

json process_map_plan_to_json(const ProcessMapPlan& plan) {
  return {{"schema", "process_map_config"},
          {"schema_version", ProcessMapPlan::kSchemaVersion},
          {"run_id", plan.run_id},
          {"material_ref", plan.material_ref.uri()},
          {"build_ref", plan.build_ref.uri()},
          {"power_range_w", plan.config.power_range},
          {"velocity_range_m_s", plan.config.velocity_range},
          {"layer_height_offsets_m", plan.config.layer_height_offsets},
          {"sweep_step_m", plan.config.sweep_step},
          {"isotherm", to_string(plan.config.isotherm)}};
}

ProcessMapPlan process_map_plan_from_json(const json& j) {
  require_schema(j, "process_map_config");
  ProcessMapPlan plan;
  plan.run_id = j.value("run_id", std::string{});
  plan.material_ref = DocumentRef::from_uri(j.value("material_ref", std::string{}));
  plan.build_ref = DocumentRef::from_uri(j.value("build_ref", std::string{}));
  plan.config.power_range = number_array(j, "power_range_w");
  plan.config.velocity_range = number_array(j, "velocity_range_m_s");
  if (j.contains("layer_height_offsets_m")) {
    const auto offsets = number_array(j, "layer_height_offsets_m");
    if (offsets.size() != 3) {
      throw Error(ErrorKind::InvalidRange, "exactly three layer height offsets are evaluated");
    }
    std::copy(offsets.begin(), offsets.end(), plan.config.layer_height_offsets.begin());
  }
  if (j.contains("sweep_step_m")) plan.config.sweep_step = number_field(j, "sweep_step_m");
  plan.config.isotherm = parse_isotherm(j.value("isotherm", "melting"));
  plan.config.validate();
  return plan;
}

// ---------------------------------------------------------------------------
// Result serialization

json process_map_result_to_json(const ProcessMapResult& r) {
  json variants = json::array();
  for (const auto& v : r.variants) {
    json cells = json::array();
    for (const auto& c : v.cells) {
      json cell = {{"power_w", c.power_w},
                   {"velocity_mm_s", c.velocity_mm_s},
                   {"lof_metric", std::isfinite(c.lof_metric) ? json(c.lof_metric) : json()},
                   {"lack_of_fusion", c.lack_of_fusion},
                   {"melt_width_um", c.melt_width_um},
                   {"melt_depth_um", c.melt_depth_um},
                   {"melt_length_um", c.melt_length_um}};
      if (c.error) cell["error"] = *c.error;
      cells.push_back(std::move(cell));
    }
    variants.push_back({{"layer_offset_um", v.layer_offset_um},
                        {"layer_height_um", v.layer_height_um},
                        {"clamped", v.clamped},
                        {"cells", std::move(cells)},
                        {"summary",
                         {{"lack_of_fusion", points_to_json(v.lack_of_fusion)},
                          {"printable", points_to_json(v.printable)}}}});
  }
  return {{"schema", "process_map_result"},
          {"schema_version", ProcessMapResult::kSchemaVersion},
          {"run_id", r.run_id},
          {"material_ref", r.material_ref},
          {"build_ref", r.build_ref},
          {"config_ref", r.config_ref},
          {"material_name", r.material_name},
          {"hatch_spacing_um", r.hatch_spacing_um},
          {"prescribed_layer_height_um", r.prescribed_layer_height_um},
          {"isotherm", to_string(r.isotherm)},
          {"power_range_w", r.power_range_w},
          {"velocity_range_mm_s", r.velocity_range_mm_s},
          {"variants", std::move(variants)}};
}

ProcessMapResult process_map_result_from_json(const json& j) {
  require_schema(j, "process_map_result");
  ProcessMapResult r;
  r.run_id = j.value("run_id", std::string{});
  r.material_ref = j.value("material_ref", std::string{});
  r.build_ref = j.value("build_ref", std::string{});
  r.config_ref = j.value("config_ref", std::string{});
  r.material_name = j.value("material_name", std::string{});
  r.hatch_spacing_um = number_field(j, "hatch_spacing_um");
  r.prescribed_layer_height_um = number_field(j, "prescribed_layer_height_um");
  r.isotherm = parse_isotherm(j.value("isotherm", "melting"));
  r.power_range_w = number_array(j, "power_range_w");
  r.velocity_range_mm_s = number_array(j, "velocity_range_mm_s");
  if (!j.contains("variants") || !j.at("variants").is_array()) {
    throw Error(ErrorKind::InvalidDocument, "process map result requires 'variants'");
  }
  for (const auto& vj : j.at("variants")) {
    LayerVariant v;
    v.layer_offset_um = number_field(vj, "layer_offset_um");
    v.layer_height_um = number_field(vj, "layer_height_um");
    v.clamped = vj.value("clamped", false);
    for (const auto& cj : vj.at("cells")) {
      ProcessMapCell c;
      c.power_w = number_field(cj, "power_w");
      c.velocity_mm_s = number_field(cj, "velocity_mm_s");
      c.lof_metric = cj.at("lof_metric").is_null() ? std::numeric_limits<double>::infinity()
                                                   : number_field(cj, "lof_metric");
      c.lack_of_fusion = cj.at("lack_of_fusion").get<bool>();
      c.melt_width_um = number_field(cj, "melt_width_um");
      c.melt_depth_um = number_field(cj, "melt_depth_um");
      c.melt_length_um = number_field(cj, "melt_length_um");
      if (cj.contains("error")) c.error = cj.at("error").get<std::string>();
      if (c.lack_of_fusion != (c.lof_metric > 1.0)) {
        throw Error(ErrorKind::InvalidDocument, "cell classification disagrees with its metric");
      }
      v.cells.push_back(std::move(c));
    }
    const json& summary = vj.at("summary");
    v.lack_of_fusion = points_from_json(summary.at("lack_of_fusion"));
    v.printable = points_from_json(summary.at("printable"));
    if (v.cells.size() != r.power_range_w.size() * r.velocity_range_mm_s.size() ||
        v.lack_of_fusion.size() + v.printable.size() != v.cells.size()) {
      throw Error(ErrorKind::InvalidDocument, "variant grid does not match the power/velocity ranges");
    }
    r.variants.push_back(std::move(v));
  }
  if (r.variants.size() != 3) {
    throw Error(ErrorKind::InvalidDocument, "process map result requires three layer variants");
  }
  return r;
}

json process_map_summary(const ProcessMapResult& result) {
  json out = json::array();
  for (const auto& v : result.variants) {
    out.push_back({{"layer_height_um", v.layer_height_um},
                   {"layer_offset_um", v.layer_offset_um},
                   {"lack_of_fusion", points_to_json(v.lack_of_fusion)},
                   {"printable", points_to_json(v.printable)}});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Computation

RosenthalParams rosenthal_params_for(const Material& material, double beam_power,
                                     double scan_velocity, double plate_temperature,
                                     double sweep_step, Isotherm isotherm) {
  RosenthalParams p;
  p.absorbed_power = material.absorptivity * beam_power;
  p.scan_speed = scan_velocity;
  p.thermal_conductivity = material.thermal_conductivity;
  p.thermal_diffusivity =
      thermal_diffusivity(material.thermal_conductivity, material.density, material.specific_heat);
  p.plate_temperature = plate_temperature;
  switch (isotherm) {
    case Isotherm::Melting: p.reference_temperature = material.transitions.t_melting; break;
    case Isotherm::Liquidus: p.reference_temperature = material.transitions.t_liquidus; break;
    case Isotherm::Solidus: p.reference_temperature = material.transitions.t_solidus; break;
  }
  p.sweep_step = sweep_step;
  return p;
}

ProcessMapResult compute_process_map(const Material& material, const BuildConfig& build,
                                     const ProcessMapConfig& config) {
  build.validate();
  config.validate();

  ProcessMapResult result;
  result.material_name = material.name;
  result.hatch_spacing_um = build.hatch_spacing * kUm;
  result.prescribed_layer_height_um = build.layer_height * kUm;
  result.isotherm = config.isotherm;
  result.power_range_w = config.power_range;
  for (double v : config.velocity_range) result.velocity_range_mm_s.push_back(velocity_label(v));

  // Melt-pool size does not depend on layer height, so solve each cell once.
  struct Solved {
    std::optional<MeltPoolDimensions> dims;
    std::string error;
  };
  std::vector<Solved> solved;
  solved.reserve(config.power_range.size() * config.velocity_range.size());
  for (double power : config.power_range) {
    for (double velocity : config.velocity_range) {
      try {
        solved.push_back({meltpool_dimensions(rosenthal_params_for(
                              material, power, velocity, build.plate_temperature,
                              config.sweep_step, config.isotherm)),
                          {}});
      } catch (const Error& e) {
        solved.push_back({std::nullopt, std::string(e.kind_name()) + ": " + e.what()});
      }
    }
  }

  constexpr double kClampFloor = 1e-6;
  constexpr double kClampThreshold = 25e-6 + 1e-12;
  for (double offset : config.layer_height_offsets) {
    LayerVariant variant;
    double layer = build.layer_height + offset;
    if (offset < 0.0 && build.layer_height <= kClampThreshold) {
      layer = kClampFloor;
      variant.clamped = true;
    }
    variant.layer_offset_um = offset * kUm;
    variant.layer_height_um = layer * kUm;

    std::size_t index = 0;
    for (double power : config.power_range) {
      for (double velocity : config.velocity_range) {
        const Solved& s = solved[index++];
        ProcessMapCell cell;
        cell.power_w = power;
        cell.velocity_mm_s = velocity_label(velocity);
        if (s.dims) {
          cell.melt_width_um = s.dims->width * kUm;
          cell.melt_depth_um = s.dims->depth * kUm;
          cell.melt_length_um = s.dims->length * kUm;
          const auto lof = lof_criterion(build.hatch_spacing, s.dims->width, layer, s.dims->depth);
          cell.lof_metric = lof.metric;
          cell.lack_of_fusion = lof.lack_of_fusion;
        } else {
          cell.lof_metric = std::numeric_limits<double>::infinity();
          cell.lack_of_fusion = true;
          cell.error = s.error;
        }
        (cell.lack_of_fusion ? variant.lack_of_fusion : variant.printable)
            .push_back({cell.power_w, cell.velocity_mm_s});
        variant.cells.push_back(std::move(cell));
      }
    }
    result.variants.push_back(std::move(variant));
  }
  return result;
}

// ---------------------------------------------------------------------------
// Workspace operations

DocumentRef init_process_map(WorkspaceStore& store, std::string_view workspace,
                             const DocumentRef& build_ref, const DocumentRef& material_ref,
                             const ProcessMapOverrides& overrides) {
  store.open_workspace(workspace);
  build_config_from_json(store.load_document(build_ref));
  material_from_json(store.load_document(material_ref));

  ProcessMapPlan plan;
  plan.material_ref = material_ref;
  plan.build_ref = build_ref;
  plan.config = ProcessMapConfig::defaults();
  if (overrides.power_range) plan.config.power_range = *overrides.power_range;
  if (overrides.velocity_range) plan.config.velocity_range = *overrides.velocity_range;
  if (overrides.sweep_step) plan.config.sweep_step = *overrides.sweep_step;
  if (overrides.isotherm) plan.config.isotherm = *overrides.isotherm;
  plan.config.validate();

  plan.run_id = overrides.run_name ? *overrides.run_name
                                   : material_ref.stem() + "-" + build_ref.stem();
  DocumentRef config_ref{std::string(workspace), Subfolder::ProcessMaps,
                         plan.run_id + "/config.json"};
  config_ref.validate();

  const WriterLock lock = store.lock_for_writing(workspace);
  const DocumentRef stale{config_ref.workspace, Subfolder::ProcessMaps,
                          plan.run_id + "/result.json"};
  if (store.document_exists(stale)) store.remove_document(stale, lock);
  return store.save_document(config_ref, process_map_plan_to_json(plan), lock);
}

DocumentRef generate_process_map(WorkspaceStore& store, const DocumentRef& config_ref) {
  const ProcessMapPlan plan = process_map_plan_from_json(store.load_document(config_ref));
  const Material material = material_from_json(store.load_document(plan.material_ref));
  const BuildConfig build = build_config_from_json(store.load_document(plan.build_ref));

  ProcessMapResult result = compute_process_map(material, build, plan.config);
  result.run_id = plan.run_id;
  result.material_ref = plan.material_ref.uri();
  result.build_ref = plan.build_ref.uri();
  result.config_ref = config_ref.uri();

  std::string filename = config_ref.filename;
  filename.replace(filename.rfind('/') + 1, std::string::npos, "result.json");
  DocumentRef result_ref{config_ref.workspace, Subfolder::ProcessMaps, filename};
  const WriterLock lock = store.lock_for_writing(config_ref.workspace);
  return store.save_document(result_ref, process_map_result_to_json(result), lock);
}

}  // namespace printmap
