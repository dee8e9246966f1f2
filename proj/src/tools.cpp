#include "printmap/tools.hpp"

#include <optional>

#include "printmap/alloy_database.hpp"
#include "printmap/documents.hpp"
#include "printmap/json_schema.hpp"
#include "printmap/process_map.hpp"
#include "printmap/properties.hpp"
#include "printmap/rosenthal.hpp"

namespace printmap {

namespace {

constexpr double kUm = 1e6;

json field(const char* type, const char* description) {
  return {{"type", type}, {"description", description}};
}

json positive(const char* description) {
  return {{"type", "number"}, {"exclusiveMinimum", 0}, {"description", description}};
}

json positive_list(const char* description) {
  return {{"type", "array"},
          {"minItems", 1},
          {"items", {{"type", "number"}, {"exclusiveMinimum", 0}}},
          {"description", description}};
}

json object_schema(json properties, std::vector<std::string> required = {}) {
  json schema = {{"type", "object"},
                 {"properties", std::move(properties)},
                 {"additionalProperties", false}};
  if (!required.empty()) schema["required"] = std::move(required);
  return schema;
}

json provider_schema() {
  json schema = object_schema({
      {"provider_kind",
       {{"type", "string"},
        {"enum", {"alloy-table", "mixture-rule"}},
        {"description", "alloy-table uses stored datasheet values; mixture-rule weights elemental data"}}},
      {"t_min", positive("Lower bound of the temperature sweep, K (default 500)")},
      {"t_max", positive("Upper bound of the temperature sweep, K (default 3500)")},
      {"evaluation_temperature", positive("Temperature the properties refer to, K (default 298.15)")},
      {"laser_wavelength", positive("Laser wavelength, m (default 1.07e-6)")},
      {"solidus_liquid_fraction", positive("Liquid fraction marking the solidus (default 0.01)")},
      {"liquidus_liquid_fraction", positive("Liquid fraction marking the liquidus (default 0.99)")},
  });
  schema["description"] = "Property provider settings; omitted keys keep their defaults";
  return schema;
}

const json kWorkspaceArg = field("string", "Workspace name; needed when a reference is a bare filename");

std::optional<std::string> optional_string(const json& args, const char* key) {
  if (!args.contains(key)) return std::nullopt;
  return args.at(key).get<std::string>();
}

double number_or(const json& args, const char* key, double fallback) {
  return args.contains(key) ? args.at(key).get<double>() : fallback;
}

DocumentRef ref_arg(const json& args, const char* key, Subfolder subfolder) {
  return resolve_document_ref(args.at(key).get<std::string>(), optional_string(args, "workspace"),
                              subfolder);
}

ProviderConfig provider_arg(const json& args) {
  return provider_config_from_json(args.contains("provider") ? args.at("provider") : json());
}

json workspace_payload(const Workspace& ws) {
  return {{"name", ws.name}, {"uri", "workspace://" + ws.name + "/"}, {"subfolders", ws.subfolders}};
}

}  // namespace

// ---------------------------------------------------------------------------
// Envelope

ToolEnvelope ToolEnvelope::success(json value) {
  ToolEnvelope e;
  e.ok = true;
  e.value = std::move(value);
  return e;
}

ToolEnvelope ToolEnvelope::failure(std::string kind, std::string message, json details) {
  ToolEnvelope e;
  e.ok = false;
  e.error_kind = std::move(kind);
  e.message = std::move(message);
  e.details = std::move(details);
  return e;
}

ToolEnvelope ToolEnvelope::failure(const Error& error) {
  return failure(std::string(error.kind_name()), error.what(), error.details());
}

json ToolEnvelope::to_json() const {
  if (ok) return {{"status", "success"}, {"value", value}};
  json j = {{"status", "error"}, {"error_kind", error_kind}, {"message", message}};
  if (details.is_object() && !details.empty()) j["details"] = details;
  return j;
}

json tool_descriptor_to_json(const ToolDescriptor& d) {
  json j = {{"name", d.name},
            {"title", d.title},
            {"description", d.description},
            {"inputSchema", d.input_schema}};
  if (d.structured_output) {
    j["outputSchema"] = {
        {"type", "object"},
        {"properties",
         {{"status", {{"type", "string"}, {"enum", {"success", "error"}}}},
          {"value", json::object()},
          {"error_kind", {{"type", "string"}}},
          {"message", {{"type", "string"}}},
          {"details", {{"type", "object"}}}}},
        {"required", {"status"}}};
  }
  return j;
}

// ---------------------------------------------------------------------------
// Helpers shared with the MCP resources

DocumentRef resolve_document_ref(std::string_view text, const std::optional<std::string>& workspace,
                                 Subfolder default_subfolder) {
  std::string_view body = text;
  if (body.starts_with('@')) body.remove_prefix(1);
  if (body.starts_with("workspace://")) {
    const ResourceUri uri = parse_resource_uri(body);
    if (!uri.filename) {
      throw Error(ErrorKind::MalformedUri, "reference names a folder, not a document",
                  {{"uri", std::string(text)}});
    }
    DocumentRef ref{uri.workspace, uri.subfolder, *uri.filename};
    ref.validate();
    return ref;
  }
  if (!workspace) {
    throw Error(ErrorKind::MalformedUri,
                "'" + std::string(text) + "' is not a workspace:// URI and no workspace was given",
                {{"uri", std::string(text)}});
  }
  std::string filename(text);
  if (!filename.ends_with(".json")) filename += ".json";
  DocumentRef ref{*workspace, default_subfolder, filename};
  ref.validate();
  return ref;
}

json subfolder_listing(const WorkspaceStore& store, std::string_view workspace,
                       Subfolder subfolder) {
  const auto files = store.list_contents(workspace, subfolder);
  json refs = json::array();
  for (const auto& file : files) {
    refs.push_back(DocumentRef{std::string(workspace), subfolder, file}.uri());
  }
  return {{"workspace", workspace},
          {"subfolder", to_string(subfolder)},
          {"files", files},
          {"uris", std::move(refs)}};
}

// ---------------------------------------------------------------------------
// Catalog

const ToolDescriptor* ToolCatalog::find(std::string_view name) const noexcept {
  for (const auto& d : descriptors_) {
    if (d.name == name) return &d;
  }
  return nullptr;
}

void ToolCatalog::add(ToolDescriptor descriptor, Handler handler) {
  descriptors_.push_back(std::move(descriptor));
  handlers_.push_back(std::move(handler));
}

ToolEnvelope ToolCatalog::call(std::string_view name, const json& arguments) const {
  std::size_t index = 0;
  while (index < descriptors_.size() && descriptors_[index].name != name) ++index;
  if (index == descriptors_.size()) {
    return ToolEnvelope::failure(std::string(to_string(ErrorKind::UnknownTool)),
                                 "no tool named '" + std::string(name) + "'",
                                 {{"tool", std::string(name)}});
  }
  const json args = arguments.is_null() ? json::object() : arguments;
  try {
    validate_json(descriptors_[index].input_schema, args);
    return ToolEnvelope::success(handlers_[index](args));
  } catch (const Error& e) {
    return ToolEnvelope::failure(e);
  } catch (const json::exception& e) {
    return ToolEnvelope::failure(std::string(to_string(ErrorKind::InvalidDocument)), e.what());
  } catch (const std::exception& e) {
    return ToolEnvelope::failure(std::string(to_string(ErrorKind::IoFailure)), e.what());
  }
}

ToolCatalog::ToolCatalog(WorkspaceStore& store) : store_(&store) {
  // Workspace ---------------------------------------------------------------
  add({"workspace_list", "List workspaces", "Names of all workspaces under the configured root, sorted.",
       object_schema(json::object())},
      [this](const json&) { return json{{"workspaces", store_->list_workspaces()}}; });

  add({"workspace_init", "Create workspace",
       "Creates a workspace with its six subfolders. Re-initializing an existing workspace is a no-op.",
       object_schema({{"name", field("string", "Workspace name, [A-Za-z0-9_-]+")}}, {"name"})},
      [this](const json& a) {
        return workspace_payload(store_->init_workspace(a.at("name").get<std::string>()));
      });

  add({"workspace_contents", "List subfolder contents",
       "Sorted JSON documents in one workspace subfolder, with their workspace:// URIs.",
       object_schema({{"workspace", field("string", "Workspace name")},
                      {"subfolder",
                       {{"type", "string"},
                        {"enum", {"compositions", "materials", "build_configs", "process_maps",
                                  "property_diagrams", "phase_transition_temperatures"}},
                        {"description", "Subfolder to list"}}}},
                     {"workspace", "subfolder"})},
      [this](const json& a) {
        return subfolder_listing(*store_, a.at("workspace").get<std::string>(),
                                 parse_subfolder(a.at("subfolder").get<std::string>()));
      });

  // Alloys and compositions ---------------------------------------------------
  add({"alloy_list", "List known alloys", "Canonical names of every alloy in the bundled table, sorted.",
       object_schema(json::object())},
      [](const json&) { return json{{"alloys", list_known_alloys()}}; });

  add({"alloy_show", "Show alloy",
       "Composition (mass fractions), aliases and reference properties of a known alloy. "
       "Matching ignores case, spaces and hyphens.",
       object_schema({{"name", field("string", "Alloy name or alias, e.g. 'SS316L'")}}, {"name"})},
      [](const json& a) { return alloy_record_to_json(lookup_alloy(a.at("name").get<std::string>())); });

  add({"composition_create", "Create composition",
       "Saves compositions/<name>.json from element amounts (normalized to mass fractions) "
       "or from a known alloy. Give exactly one of 'elements' and 'alloy'.",
       object_schema({{"workspace", field("string", "Workspace name")},
                      {"name", field("string", "Document name without .json")},
                      {"elements",
                       {{"type", "object"},
                        {"additionalProperties", {{"type", "number"}, {"exclusiveMinimum", 0}}},
                        {"description", "Element symbol to positive amount, e.g. {\"Fe\": 0.9, \"C\": 0.1}"}}},
                      {"alloy", field("string", "Known alloy name or alias")}},
                     {"workspace", "name"})},
      [this](const json& a) {
        std::optional<json> amounts;
        if (a.contains("elements")) amounts = a.at("elements");
        const DocumentRef ref =
            create_composition(*store_, a.at("workspace").get<std::string>(),
                               a.at("name").get<std::string>(), amounts, optional_string(a, "alloy"));
        return json{{"composition_ref", document_ref_to_json(ref)},
                    {"composition", store_->load_document(ref)}};
      });

  add({"database_select", "Select thermodynamic database",
       "Thermodynamic database tag a CALPHAD run would use for a composition (metadata only).",
       object_schema({{"elements",
                       {{"type", "object"},
                        {"additionalProperties", {{"type", "number"}, {"exclusiveMinimum", 0}}},
                        {"description", "Element symbol to positive amount"}}},
                      {"composition_ref", field("string", "Composition document reference")},
                      {"workspace", kWorkspaceArg}})},
      [this](const json& a) {
        if (a.contains("elements") == a.contains("composition_ref")) {
          throw Error(ErrorKind::InvalidComposition,
                      "give exactly one of 'elements' and 'composition_ref'");
        }
        const Composition c =
            a.contains("elements")
                ? parse_composition(a.at("elements"))
                : composition_document_from_json(
                      store_->load_document(ref_arg(a, "composition_ref", Subfolder::Compositions)))
                      .composition;
        return json{{"database_tag", select_database_tag(c)},
                    {"dominant_element", c.dominant_element()}};
      });

  // Properties ----------------------------------------------------------------
  add({"phase_transitions_calculate", "Calculate phase transitions",
       "Solidus, liquidus and melting temperature (K) for a composition document. Writes "
       "phase_transition_temperatures/<name>.json, and for the mixture-rule provider a "
       "liquid-fraction diagram under property_diagrams/.",
       object_schema({{"composition_ref", field("string", "Composition document reference")},
                      {"workspace", kWorkspaceArg},
                      {"provider", provider_schema()}},
                     {"composition_ref"})},
      [this](const json& a) {
        const auto outcome = calculate_phase_transitions(
            *store_, ref_arg(a, "composition_ref", Subfolder::Compositions), provider_arg(a));
        json out = {{"transitions_ref", document_ref_to_json(outcome.transitions_ref)},
                    {"t_solidus_k", outcome.transitions.t_solidus},
                    {"t_liquidus_k", outcome.transitions.t_liquidus},
                    {"t_melting_k", outcome.transitions.t_melting}};
        if (outcome.diagram_ref) out["diagram_ref"] = document_ref_to_json(*outcome.diagram_ref);
        return out;
      });

  add({"material_compile", "Compile material",
       "Builds materials/<name>.json from a composition document: transition temperatures, "
       "density, specific heat, conductivity, resistivity and absorptivity (SI units).",
       object_schema({{"composition_ref", field("string", "Composition document reference")},
                      {"workspace", kWorkspaceArg},
                      {"provider", provider_schema()}},
                     {"composition_ref"})},
      [this](const json& a) {
        const DocumentRef ref =
            compile_material(*store_, ref_arg(a, "composition_ref", Subfolder::Compositions),
                             provider_arg(a));
        return json{{"material_ref", document_ref_to_json(ref)},
                    {"material", store_->load_document(ref)}};
      });

  add({"absorptivity_estimate", "Estimate absorptivity",
       "Laser absorptivity from electrical resistivity with the three-term Bramson series.",
       object_schema({{"electrical_resistivity_ohm_m", positive("Electrical resistivity, Ohm m")},
                      {"wavelength_m", positive("Laser wavelength, m (default 1.07e-6)")}},
                     {"electrical_resistivity_ohm_m"})},
      [](const json& a) {
        const auto e = absorptivity_bramson(a.at("electrical_resistivity_ohm_m").get<double>(),
                                            number_or(a, "wavelength_m", 1.070e-6));
        return json{{"absorptivity", e.value},
                    {"series_argument", e.series_argument},
                    {"warning", e.warning}};
      });

  // Builds and melt pools -----------------------------------------------------
  add({"build_config_create", "Create build configuration",
       "Saves build_configs/<name>.json with beam power, scan velocity, layer height, "
       "hatch spacing (default 50e-6 m) and plate temperature (default 298.15 K).",
       object_schema({{"workspace", field("string", "Workspace name")},
                      {"name", field("string", "Document name without .json")},
                      {"beam_power_w", positive("Beam power, W")},
                      {"scan_velocity_m_s", positive("Scan velocity, m/s")},
                      {"layer_height_m", positive("Layer height, m")},
                      {"hatch_spacing_m", positive("Hatch spacing, m")},
                      {"plate_temperature_k", positive("Build plate temperature, K")}},
                     {"workspace", "name", "beam_power_w", "scan_velocity_m_s", "layer_height_m"})},
      [this](const json& a) {
        BuildConfig c;
        c.beam_power = a.at("beam_power_w").get<double>();
        c.scan_velocity = a.at("scan_velocity_m_s").get<double>();
        c.layer_height = a.at("layer_height_m").get<double>();
        c.hatch_spacing = number_or(a, "hatch_spacing_m", c.hatch_spacing);
        c.plate_temperature = number_or(a, "plate_temperature_k", c.plate_temperature);
        const DocumentRef ref = create_build_config(*store_, a.at("workspace").get<std::string>(),
                                                    a.at("name").get<std::string>(), c);
        return json{{"build_config_ref", document_ref_to_json(ref)},
                    {"build_config", build_config_to_json(c)}};
      });

  add({"meltpool_dimensions", "Melt pool dimensions",
       "Rosenthal melt pool width, depth and length (um) for a material at one power and "
       "velocity. With hatch spacing and layer height it also evaluates lack of fusion.",
       object_schema({{"material_ref", field("string", "Material document reference")},
                      {"workspace", kWorkspaceArg},
                      {"beam_power_w", positive("Beam power, W")},
                      {"scan_velocity_m_s", positive("Scan velocity, m/s")},
                      {"plate_temperature_k", positive("Build plate temperature, K (default 298.15)")},
                      {"sweep_step_m", positive("Radial sweep step, m (default 1e-6)")},
                      {"isotherm",
                       {{"type", "string"},
                        {"enum", {"melting", "liquidus", "solidus"}},
                        {"description", "Isotherm that bounds the melt pool (default melting)"}}},
                      {"hatch_spacing_m", positive("Hatch spacing, m")},
                      {"layer_height_m", positive("Layer height, m")}},
                     {"material_ref", "beam_power_w", "scan_velocity_m_s"})},
      [this](const json& a) {
        const Material m =
            material_from_json(store_->load_document(ref_arg(a, "material_ref", Subfolder::Materials)));
        const RosenthalParams p = rosenthal_params_for(
            m, a.at("beam_power_w").get<double>(), a.at("scan_velocity_m_s").get<double>(),
            number_or(a, "plate_temperature_k", 298.15), number_or(a, "sweep_step_m", 1e-6),
            parse_isotherm(a.value("isotherm", "melting")));
        const MeltPoolDimensions d = meltpool_dimensions(p);
        json out = {{"material_name", m.name},
                    {"absorbed_power_w", p.absorbed_power},
                    {"melt_width_um", d.width * kUm},
                    {"melt_depth_um", d.depth * kUm},
                    {"melt_length_um", d.length * kUm},
                    {"trailing_length_um", d.trailing_length * kUm}};
        if (a.contains("hatch_spacing_m") && a.contains("layer_height_m")) {
          const auto lof = lof_criterion(a.at("hatch_spacing_m").get<double>(), d.width,
                                         a.at("layer_height_m").get<double>(), d.depth);
          out["lof_metric"] = lof.metric;
          out["lack_of_fusion"] = lof.lack_of_fusion;
        }
        return out;
      });

  // Process maps ----------------------------------------------------------------
  add({"process_map_init", "Initialize process map",
       "Creates process_maps/<run>/config.json combining a build configuration and a material "
       "with the power/velocity grid (defaults 100-1000 W and 0.1-1.0 m/s in ten steps) and "
       "layer heights at -25, 0 and +25 um around the build's layer height.",
       object_schema({{"workspace", field("string", "Workspace name")},
                      {"build_ref", field("string", "Build configuration reference")},
                      {"material_ref", field("string", "Material document reference")},
                      {"power_range_w", positive_list("Beam powers, W, strictly increasing")},
                      {"velocity_range_m_s", positive_list("Scan velocities, m/s, strictly increasing")},
                      {"sweep_step_m", positive("Radial sweep step, m (default 1e-6)")},
                      {"isotherm",
                       {{"type", "string"},
                        {"enum", {"melting", "liquidus", "solidus"}},
                        {"description", "Isotherm that bounds the melt pool (default melting)"}}},
                      {"run_name", field("string", "Run folder name (default <material>-<build>)")}},
                     {"workspace", "build_ref", "material_ref"})},
      [this](const json& a) {
        ProcessMapOverrides o;
        if (a.contains("power_range_w")) o.power_range = a.at("power_range_w").get<std::vector<double>>();
        if (a.contains("velocity_range_m_s")) {
          o.velocity_range = a.at("velocity_range_m_s").get<std::vector<double>>();
        }
        if (a.contains("sweep_step_m")) o.sweep_step = a.at("sweep_step_m").get<double>();
        if (a.contains("isotherm")) o.isotherm = parse_isotherm(a.at("isotherm").get<std::string>());
        o.run_name = optional_string(a, "run_name");
        const DocumentRef ref =
            init_process_map(*store_, a.at("workspace").get<std::string>(),
                             ref_arg(a, "build_ref", Subfolder::BuildConfigs),
                             ref_arg(a, "material_ref", Subfolder::Materials), o);
        const ProcessMapPlan plan = process_map_plan_from_json(store_->load_document(ref));
        return json{{"config_ref", document_ref_to_json(ref)},
                    {"run_id", plan.run_id},
                    {"cell_count", plan.config.power_range.size() * plan.config.velocity_range.size() *
                                       plan.config.layer_height_offsets.size()}};
      });

  add({"process_map_generate", "Generate process map",
       "Evaluates every (power, velocity, layer height) cell of a process-map config, writes "
       "result.json next to it, and returns the lack-of-fusion and printable parameter "
       "combinations per layer height.",
       object_schema({{"config_ref", field("string", "Process-map config reference, e.g. <run>/config.json")},
                      {"workspace", kWorkspaceArg}},
                     {"config_ref"})},
      [this](const json& a) {
        const DocumentRef ref =
            generate_process_map(*store_, ref_arg(a, "config_ref", Subfolder::ProcessMaps));
        const ProcessMapResult result = process_map_result_from_json(store_->load_document(ref));
        return json{{"result_ref", document_ref_to_json(ref)},
                    {"material_name", result.material_name},
                    {"hatch_spacing_um", result.hatch_spacing_um},
                    {"summary", process_map_summary(result)}};
      });

  add({"process_map_render", "Render process map",
       "Draws a process-map result as SVG in its run folder (velocity in mm/s against power in W, "
       "one panel per layer height).",
       object_schema({{"result_ref", field("string", "Process-map result reference, e.g. <run>/result.json")},
                      {"workspace", kWorkspaceArg},
                      {"filename",
                       {{"type", "string"},
                        {"pattern", "^[A-Za-z0-9_-][A-Za-z0-9_.-]*\\.svg$"},
                        {"description", "SVG file name inside the run folder (default process_map.svg)"}}}},
                     {"result_ref"})},
      [this](const json& a) {
        const DocumentRef ref = ref_arg(a, "result_ref", Subfolder::ProcessMaps);
        const std::string name = a.value("filename", "process_map.svg");
        const auto target = store_->resolve(ref).parent_path() / name;
        render_process_map(*store_, ref, target);
        std::string relative = ref.filename;
        relative = relative.substr(0, relative.rfind('/') + 1) + name;
        return json{{"result_ref", document_ref_to_json(ref)},
                    {"figure", "process_maps/" + relative},
                    {"bytes", std::filesystem::file_size(target)}};
      });

  // Generic -------------------------------------------------------------------
  add({"document_load", "Load document",
       "Returns a stored JSON document after checking it against its subfolder's schema.",
       object_schema({{"ref", field("string", "workspace:// URI, or a filename with 'workspace' and 'subfolder'")},
                      {"workspace", kWorkspaceArg},
                      {"subfolder",
                       {{"type", "string"},
                        {"enum", {"compositions", "materials", "build_configs", "process_maps",
                                  "property_diagrams", "phase_transition_temperatures"}},
                        {"description", "Subfolder for a bare filename (default materials)"}}}},
                     {"ref"})},
      [this](const json& a) {
        const Subfolder sub = parse_subfolder(a.value("subfolder", "materials"));
        const DocumentRef ref = ref_arg(a, "ref", sub);
        return json{{"ref", document_ref_to_json(ref)}, {"document", store_->load_document(ref)}};
      });
}

}  // namespace printmap
