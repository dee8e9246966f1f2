#pragma once

#include <optional>
#include <string>
#include <vector>

#include "printmap/process_map.hpp"
#include "printmap/properties.hpp"
#include "printmap/workspace.hpp"

namespace printmap {

/// compositions/<name>.json
struct CompositionDocument {
  static constexpr int kSchemaVersion = 1;

  std::string name;
  std::optional<std::string> alloy;  // canonical name when taken from the alloy table
  Composition composition = Composition::from_normalized({{"Fe", 1.0}});

  bool operator==(const CompositionDocument&) const = default;
};

json composition_document_to_json(const CompositionDocument& doc);
CompositionDocument composition_document_from_json(const json& j);

/// phase_transition_temperatures/<name>.json
struct PhaseTransitionsDocument {
  static constexpr int kSchemaVersion = 1;

  std::string composition_ref;
  ProviderKind provider_kind = ProviderKind::AlloyTable;
  double t_min = 500.0;
  double t_max = 3500.0;
  PhaseTransitions transitions;
  std::string database_tag;

  bool operator==(const PhaseTransitionsDocument&) const = default;
};

json phase_transitions_document_to_json(const PhaseTransitionsDocument& doc);
PhaseTransitionsDocument phase_transitions_document_from_json(const json& j);

/// property_diagrams/<name>.json: liquid fraction against temperature.
struct PropertyDiagramDocument {
  static constexpr int kSchemaVersion = 1;

  std::string composition_ref;
  std::string quantity = "liquid_fraction";
  std::vector<double> temperatures_k;
  std::vector<double> values;

  bool operator==(const PropertyDiagramDocument&) const = default;
};

json property_diagram_to_json(const PropertyDiagramDocument& doc);
PropertyDiagramDocument property_diagram_from_json(const json& j);

json provider_config_to_json(const ProviderConfig& config);
/// Missing keys keep their defaults. Throws InvalidConfig.
ProviderConfig provider_config_from_json(const json& j);

// Workspace workflows. Each takes the writer lock for its writes.

/// Writes compositions/<name>.json from raw amounts (normalized here) or,
/// when `alloy` is set, from the alloy table.
DocumentRef create_composition(WorkspaceStore& store, std::string_view workspace,
                               std::string_view name, const std::optional<json>& amounts,
                               const std::optional<std::string>& alloy);

struct PhaseTransitionsOutcome {
  DocumentRef transitions_ref;
  std::optional<DocumentRef> diagram_ref;  // mixture-rule only
  PhaseTransitions transitions;
};

/// Writes phase_transition_temperatures/<stem>.json, plus the liquid-fraction
/// curve under property_diagrams/ for the mixture-rule provider.
PhaseTransitionsOutcome calculate_phase_transitions(WorkspaceStore& store,
                                                    const DocumentRef& composition_ref,
                                                    const ProviderConfig& config);

/// Compiles materials/<stem>.json. Reuses a phase-transition document for the
/// same composition and provider when one exists, else computes inline.
DocumentRef compile_material(WorkspaceStore& store, const DocumentRef& composition_ref,
                             const ProviderConfig& config);

/// Writes build_configs/<name>.json.
DocumentRef create_build_config(WorkspaceStore& store, std::string_view workspace,
                                std::string_view name, const BuildConfig& config);

}  // namespace printmap
