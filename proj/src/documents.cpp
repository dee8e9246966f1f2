#include "printmap/documents.hpp"

namespace printmap {

namespace {

void require_schema(const json& j, const char* schema) {
  const std::string found =
      j.is_object() && j.contains("schema") && j.at("schema").is_string()
          ? j.at("schema").get<std::string>()
          : std::string{};
  if (found != schema) {
    throw Error(ErrorKind::SchemaMismatch,
                std::string("expected a ") + schema + " document, found '" + found + "'",
                {{"expected", schema}, {"found", found}});
  }
}

double number_field(const json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_number()) {
    throw Error(ErrorKind::InvalidDocument, std::string("missing numeric field '") + key + "'",
                {{"field", key}});
  }
  return j.at(key).get<double>();
}

std::string string_field(const json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_string()) {
    throw Error(ErrorKind::InvalidDocument, std::string("missing string field '") + key + "'",
                {{"field", key}});
  }
  return j.at(key).get<std::string>();
}

DocumentRef named_ref(std::string_view workspace, Subfolder subfolder, std::string_view name) {
  DocumentRef ref{std::string(workspace), subfolder, std::string(name) + ".json"};
  if (name.empty() || name.find('/') != std::string_view::npos) {
    throw Error(ErrorKind::InvalidName, "invalid document name '" + std::string(name) + "'",
                {{"name", name}});
  }
  ref.validate();
  return ref;
}

}  // namespace

// ---------------------------------------------------------------------------
// Composition

json composition_document_to_json(const CompositionDocument& doc) {
  json j = {{"schema", "composition"},
            {"schema_version", CompositionDocument::kSchemaVersion},
            {"name", doc.name}};
  if (doc.alloy) j["alloy"] = *doc.alloy;
  j["elements"] = doc.composition;
  return j;
}

CompositionDocument composition_document_from_json(const json& j) {
  require_schema(j, "composition");
  if (!j.contains("elements")) {
    throw Error(ErrorKind::InvalidDocument, "composition document requires 'elements'");
  }
  CompositionDocument doc{.name = string_field(j, "name"),
                          .alloy = std::nullopt,
                          .composition = composition_from_json(j.at("elements"))};
  if (j.contains("alloy")) doc.alloy = string_field(j, "alloy");
  return doc;
}

// ---------------------------------------------------------------------------
// Phase transitions

json phase_transitions_document_to_json(const PhaseTransitionsDocument& doc) {
  return {{"schema", "phase_transitions"},
          {"schema_version", PhaseTransitionsDocument::kSchemaVersion},
          {"composition_ref", doc.composition_ref},
          {"provider_kind", to_string(doc.provider_kind)},
          {"t_min", doc.t_min},
          {"t_max", doc.t_max},
          {"t_solidus", doc.transitions.t_solidus},
          {"t_liquidus", doc.transitions.t_liquidus},
          {"t_melting", doc.transitions.t_melting},
          {"database_tag", doc.database_tag}};
}

PhaseTransitionsDocument phase_transitions_document_from_json(const json& j) {
  require_schema(j, "phase_transitions");
  PhaseTransitionsDocument doc;
  doc.composition_ref = string_field(j, "composition_ref");
  doc.provider_kind = parse_provider_kind(string_field(j, "provider_kind"));
  doc.t_min = number_field(j, "t_min");
  doc.t_max = number_field(j, "t_max");
  doc.transitions.t_solidus = number_field(j, "t_solidus");
  doc.transitions.t_liquidus = number_field(j, "t_liquidus");
  doc.transitions.t_melting = number_field(j, "t_melting");
  doc.database_tag = j.value("database_tag", std::string{});
  const auto& t = doc.transitions;
  if (!(t.t_solidus <= t.t_liquidus) || t.t_melting != (t.t_solidus + t.t_liquidus) / 2.0) {
    throw Error(ErrorKind::InvalidDocument,
                "transitions need solidus <= liquidus and melting at their midpoint");
  }
  return doc;
}

// ---------------------------------------------------------------------------
// Property diagram

json property_diagram_to_json(const PropertyDiagramDocument& doc) {
  return {{"schema", "property_diagram"},
          {"schema_version", PropertyDiagramDocument::kSchemaVersion},
          {"composition_ref", doc.composition_ref},
          {"quantity", doc.quantity},
          {"temperatures_k", doc.temperatures_k},
          {"values", doc.values}};
}

PropertyDiagramDocument property_diagram_from_json(const json& j) {
  require_schema(j, "property_diagram");
  PropertyDiagramDocument doc;
  doc.composition_ref = string_field(j, "composition_ref");
  doc.quantity = string_field(j, "quantity");
  try {
    doc.temperatures_k = j.at("temperatures_k").get<std::vector<double>>();
    doc.values = j.at("values").get<std::vector<double>>();
  } catch (const json::exception&) {
    throw Error(ErrorKind::InvalidDocument, "property diagram needs numeric temperatures_k and values");
  }
  if (doc.temperatures_k.size() != doc.values.size()) {
    throw Error(ErrorKind::InvalidDocument, "temperatures_k and values differ in length");
  }
  return doc;
}

// ---------------------------------------------------------------------------
// Provider config

json provider_config_to_json(const ProviderConfig& c) {
  return {{"provider_kind", to_string(c.provider_kind)},
          {"t_min", c.t_min},
          {"t_max", c.t_max},
          {"evaluation_temperature", c.evaluation_temperature},
          {"laser_wavelength", c.laser_wavelength},
          {"solidus_liquid_fraction", c.solidus_liquid_fraction},
          {"liquidus_liquid_fraction", c.liquidus_liquid_fraction}};
}

ProviderConfig provider_config_from_json(const json& j) {
  ProviderConfig c;
  if (j.is_null()) return c;
  if (!j.is_object()) throw Error(ErrorKind::InvalidConfig, "provider config must be an object");
  auto read = [&](const char* key, double& target) {
    if (!j.contains(key)) return;
    if (!j.at(key).is_number()) {
      throw Error(ErrorKind::InvalidConfig, std::string("'") + key + "' must be a number",
                  {{"field", key}});
    }
    target = j.at(key).get<double>();
  };
  if (j.contains("provider_kind")) {
    if (!j.at("provider_kind").is_string()) {
      throw Error(ErrorKind::InvalidConfig, "'provider_kind' must be a string");
    }
    c.provider_kind = parse_provider_kind(j.at("provider_kind").get<std::string>());
  }
  read("t_min", c.t_min);
  read("t_max", c.t_max);
  read("evaluation_temperature", c.evaluation_temperature);
  read("laser_wavelength", c.laser_wavelength);
  read("solidus_liquid_fraction", c.solidus_liquid_fraction);
  read("liquidus_liquid_fraction", c.liquidus_liquid_fraction);
  c.validate();
  return c;
}

// ---------------------------------------------------------------------------
// Schema registry

const std::vector<DocumentSchema>& document_schemas() {
  static const std::vector<DocumentSchema> schemas = {
      {"composition", Subfolder::Compositions, CompositionDocument::kSchemaVersion,
       [](const json& j) { composition_document_from_json(j); }},
      {"phase_transitions", Subfolder::PhaseTransitionTemperatures,
       PhaseTransitionsDocument::kSchemaVersion,
       [](const json& j) { phase_transitions_document_from_json(j); }},
      {"property_diagram", Subfolder::PropertyDiagrams, PropertyDiagramDocument::kSchemaVersion,
       [](const json& j) { property_diagram_from_json(j); }},
      {"material", Subfolder::Materials, Material::kSchemaVersion,
       [](const json& j) { material_from_json(j); }},
      {"build_config", Subfolder::BuildConfigs, BuildConfig::kSchemaVersion,
       [](const json& j) { build_config_from_json(j); }},
      {"process_map_config", Subfolder::ProcessMaps, ProcessMapPlan::kSchemaVersion,
       [](const json& j) { process_map_plan_from_json(j); }},
      {"process_map_result", Subfolder::ProcessMaps, ProcessMapResult::kSchemaVersion,
       [](const json& j) { process_map_result_from_json(j); }},
  };
  return schemas;
}

// ---------------------------------------------------------------------------
// Workflows

DocumentRef create_composition(WorkspaceStore& store, std::string_view workspace,
                               std::string_view name, const std::optional<json>& amounts,
                               const std::optional<std::string>& alloy) {
  if (amounts.has_value() == alloy.has_value()) {
    throw Error(ErrorKind::InvalidComposition, "give either element amounts or an alloy name");
  }
  const DocumentRef ref = named_ref(workspace, Subfolder::Compositions, name);
  store.open_workspace(workspace);

  CompositionDocument doc{.name = std::string(name), .alloy = std::nullopt,
                          .composition = Composition::from_normalized({{"Fe", 1.0}})};
  if (alloy) {
    const AlloyRecord& record = lookup_alloy(*alloy);
    doc.alloy = record.name;
    doc.composition = record.composition;
  } else {
    doc.composition = parse_composition(*amounts);
  }
  return store.save_document(ref, composition_document_to_json(doc));
}

PhaseTransitionsOutcome calculate_phase_transitions(WorkspaceStore& store,
                                                    const DocumentRef& composition_ref,
                                                    const ProviderConfig& config) {
  config.validate();
  const CompositionDocument comp =
      composition_document_from_json(store.load_document(composition_ref));
  const auto provider = make_provider(config.provider_kind);

  PhaseTransitionsOutcome outcome;
  outcome.transitions = provider->phase_transitions(comp.composition, config);

  const PhaseTransitionsDocument doc{.composition_ref = composition_ref.uri(),
                                     .provider_kind = config.provider_kind,
                                     .t_min = config.t_min,
                                     .t_max = config.t_max,
                                     .transitions = outcome.transitions,
                                     .database_tag = select_database_tag(comp.composition)};

  const WriterLock lock = store.lock_for_writing(composition_ref.workspace);
  outcome.transitions_ref = store.save_document(
      {composition_ref.workspace, Subfolder::PhaseTransitionTemperatures, composition_ref.filename},
      phase_transitions_document_to_json(doc), lock);

  if (const auto* mixture = dynamic_cast<const MixtureRuleProvider*>(provider.get())) {
    const LiquidFractionCurve curve = mixture->liquid_fraction_curve(comp.composition, config);
    const PropertyDiagramDocument diagram{.composition_ref = composition_ref.uri(),
                                          .quantity = "liquid_fraction",
                                          .temperatures_k = curve.temperatures,
                                          .values = curve.liquid_fraction};
    outcome.diagram_ref = store.save_document(
        {composition_ref.workspace, Subfolder::PropertyDiagrams,
         composition_ref.stem() + "-liquid-fraction.json"},
        property_diagram_to_json(diagram), lock);
  }
  return outcome;
}

DocumentRef compile_material(WorkspaceStore& store, const DocumentRef& composition_ref,
                             const ProviderConfig& config) {
  config.validate();
  if (composition_ref.subfolder != Subfolder::Compositions) {
    throw Error(ErrorKind::SchemaMismatch, "material compilation takes a composition reference",
                {{"expected", "compositions"}, {"found", to_string(composition_ref.subfolder)}});
  }
  const CompositionDocument comp =
      composition_document_from_json(store.load_document(composition_ref));

  std::optional<PhaseTransitions> known;
  const DocumentRef transitions_ref{composition_ref.workspace,
                                    Subfolder::PhaseTransitionTemperatures,
                                    composition_ref.filename};
  if (store.document_exists(transitions_ref)) {
    const auto stored = phase_transitions_document_from_json(store.load_document(transitions_ref));
    if (stored.composition_ref == composition_ref.uri() &&
        stored.provider_kind == config.provider_kind && stored.t_min == config.t_min &&
        stored.t_max == config.t_max) {
      known = stored.transitions;
    }
  }

  const Material material =
      build_material(comp.alloy.value_or(comp.name), comp.composition, config, known);
  return store.save_document(
      {composition_ref.workspace, Subfolder::Materials, composition_ref.filename},
      material_to_json(material));
}

DocumentRef create_build_config(WorkspaceStore& store, std::string_view workspace,
                                std::string_view name, const BuildConfig& config) {
  config.validate();
  const DocumentRef ref = named_ref(workspace, Subfolder::BuildConfigs, name);
  store.open_workspace(workspace);
  return store.save_document(ref, build_config_to_json(config));
}

}  // namespace printmap
