#pragma once

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "printmap/alloy_database.hpp"
#include "printmap/composition.hpp"

namespace printmap {

// ---------------------------------------------------------------------------
// Elemental data
// ---------------------------------------------------------------------------

/// Room-temperature values for a pure element, SI units.
struct ElementProperties {
  std::string symbol;
  double melting_point = 0.0;           // K
  double density = 0.0;                 // kg/m^3
  double specific_heat = 0.0;           // J/(kg K)
  double thermal_conductivity = 0.0;    // W/(m K)
  double electrical_resistivity = 0.0;  // Ohm m
  std::vector<std::string> sources;
};

class ElementTable {
 public:
  static ElementTable from_json(const json& document);
  static const ElementTable& bundled();

  /// Throws ElementDataMissing.
  const ElementProperties& at(std::string_view symbol) const;
  const ElementProperties* find(std::string_view symbol) const noexcept;
  std::vector<std::string> symbols() const;

 private:
  std::vector<ElementProperties> elements_;
};

// ---------------------------------------------------------------------------
// Provider interface
// ---------------------------------------------------------------------------

struct PhaseTransitions {
  double t_solidus = 0.0;
  double t_liquidus = 0.0;
  double t_melting = 0.0;

  /// Sets the melting temperature to the midpoint.
  static PhaseTransitions from_bounds(double solidus, double liquidus);

  bool operator==(const PhaseTransitions&) const = default;
};

enum class ProviderKind { AlloyTable, MixtureRule };

std::string_view to_string(ProviderKind kind) noexcept;
/// "alloy-table" or "mixture-rule"; throws InvalidConfig otherwise.
ProviderKind parse_provider_kind(std::string_view text);

struct ProviderConfig {
  ProviderKind provider_kind = ProviderKind::AlloyTable;
  double t_min = 500.0;
  double t_max = 3500.0;
  double evaluation_temperature = 298.15;
  double laser_wavelength = 1.070e-6;
  double solidus_liquid_fraction = 0.01;
  double liquidus_liquid_fraction = 0.99;

  /// Throws InvalidConfig.
  void validate() const;
};

struct TransportProperties {
  double density = 0.0;
  double specific_heat = 0.0;
  double thermal_conductivity = 0.0;
  double electrical_resistivity = 0.0;

  bool operator==(const TransportProperties&) const = default;
};

/// Stand-in for a thermodynamic engine: anything that can turn a
/// composition into transition temperatures and transport properties.
class PropertyProvider {
 public:
  virtual ~PropertyProvider() = default;

  virtual ProviderKind kind() const noexcept = 0;
  virtual PhaseTransitions phase_transitions(const Composition& composition,
                                             const ProviderConfig& config) const = 0;
  virtual TransportProperties transport_properties(const Composition& composition,
                                                   const ProviderConfig& config) const = 0;
};

/// Serves stored datasheet values for compositions present in an alloy table.
class AlloyTableProvider final : public PropertyProvider {
 public:
  explicit AlloyTableProvider(const AlloyDatabase& database = AlloyDatabase::bundled())
      : database_(&database) {}

  ProviderKind kind() const noexcept override { return ProviderKind::AlloyTable; }
  PhaseTransitions phase_transitions(const Composition& composition,
                                     const ProviderConfig& config) const override;
  TransportProperties transport_properties(const Composition& composition,
                                           const ProviderConfig& config) const override;

  /// Throws AlloyNotFound when no record matches, or ElementDataMissing when
  /// the matching record carries no properties.
  const AlloyRecord& resolve(const Composition& composition) const;

 private:
  const AlloyDatabase* database_;
};

struct LiquidFractionCurve {
  std::vector<double> temperatures;
  std::vector<double> liquid_fraction;
};

/// Mass-fraction-weighted elemental estimates.
///
/// Each element counts as fully liquid once the temperature reaches its
/// elemental melting point, so the liquid-fraction curve is a staircase.
/// Transport properties are linear combinations of the elemental values,
/// which real alloys do not obey for conductivity and resistivity.
class MixtureRuleProvider final : public PropertyProvider {
 public:
  explicit MixtureRuleProvider(const ElementTable& elements = ElementTable::bundled())
      : elements_(&elements) {}

  ProviderKind kind() const noexcept override { return ProviderKind::MixtureRule; }
  PhaseTransitions phase_transitions(const Composition& composition,
                                     const ProviderConfig& config) const override;
  TransportProperties transport_properties(const Composition& composition,
                                           const ProviderConfig& config) const override;

  double liquid_fraction(const Composition& composition, double temperature) const;

  /// Samples the staircase on the 1 K grid t_min, t_min + 1, ..., t_max.
  LiquidFractionCurve liquid_fraction_curve(const Composition& composition,
                                            const ProviderConfig& config) const;

 private:
  const ElementTable* elements_;
};

std::unique_ptr<PropertyProvider> make_provider(ProviderKind kind);

PhaseTransitions estimate_phase_transitions(const Composition& composition,
                                            const ProviderConfig& config);
TransportProperties estimate_transport_properties(const Composition& composition,
                                                  const ProviderConfig& config);

// ---------------------------------------------------------------------------
// Absorptivity and database selection
// ---------------------------------------------------------------------------

struct AbsorptivityEstimate {
  double value = 0.0;
  /// Resistivity over wavelength, both in cm-based units (Ohm cm / cm).
  double series_argument = 0.0;
  /// Set when the series argument exceeds 5, where three terms stop being
  /// a good approximation.
  bool warning = false;
};

/// Normal spectral emissivity of a metal from its DC resistivity, used as
/// laser absorptivity:
///
///   x = rho[Ohm cm] / lambda[cm]
///   e = 0.365 sqrt(x) - 0.0667 x + 0.006 x^(3/2)
///
/// Inputs are SI (Ohm m, m). Throws NonPositiveInput, and
/// ResultOutOfUnitInterval when e falls outside (0, 1).
AbsorptivityEstimate absorptivity_bramson(double electrical_resistivity, double wavelength);

/// Name of the thermodynamic database a CALPHAD run would pick for this
/// composition (TCFE14, TCNI12, TCAL9, TCTI6, TCHEA7, PURE5). Metadata only.
std::string select_database_tag(const Composition& composition);

// ---------------------------------------------------------------------------
// Material
// ---------------------------------------------------------------------------

struct Material {
  static constexpr int kSchemaVersion = 1;

  std::string name;
  Composition composition;
  double thermal_conductivity = 0.0;
  double density = 0.0;
  double specific_heat = 0.0;
  double electrical_resistivity = 0.0;
  double absorptivity = 0.0;
  PhaseTransitions transitions;
  double evaluation_temperature = 298.15;

  ProviderKind provider_kind = ProviderKind::AlloyTable;
  std::string database_tag;
  bool absorptivity_warning = false;

  /// Throws InvalidDocument naming the first broken invariant.
  void validate() const;

  bool operator==(const Material&) const = default;
};

json material_to_json(const Material& material);
Material material_from_json(const json& j);

/// Runs the provider chain for one composition: transitions, transport
/// properties, then absorptivity at the configured wavelength.
Material build_material(std::string name, const Composition& composition,
                        const ProviderConfig& config,
                        std::optional<PhaseTransitions> known_transitions = std::nullopt);

}  // namespace printmap

template <>
struct nlohmann::adl_serializer<printmap::Material> {
  static void to_json(json& j, const printmap::Material& m) { j = printmap::material_to_json(m); }
  static printmap::Material from_json(const json& j) { return printmap::material_from_json(j); }
};
