#include "printmap/properties.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "printmap/bundled_data.hpp"

namespace printmap {

namespace {

double number_field(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key) || !j.at(key).is_number()) {
    throw Error(ErrorKind::InvalidDocument, std::string("missing numeric field '") + key + "'",
                {{"field", key}});
  }
  return j.at(key).get<double>();
}

bool positive_finite(double v) { return std::isfinite(v) && v > 0.0; }

}  // namespace

// ---------------------------------------------------------------------------
// ElementTable

ElementTable ElementTable::from_json(const json& document) {
  if (!document.is_object() || document.value("schema_version", 0) != 1) {
    throw Error(ErrorKind::SchemaMismatch, "elements file requires schema_version 1");
  }
  ElementTable table;
  std::set<std::string> seen;
  for (const auto& entry : document.at("elements")) {
    ElementProperties e;
    e.symbol = entry.at("symbol").get<std::string>();
    if (!is_element_symbol(e.symbol) || !seen.insert(e.symbol).second) {
      throw Error(ErrorKind::InvalidDocument, "bad or duplicate element '" + e.symbol + "'");
    }
    e.melting_point = number_field(entry, "melting_point_k");
    e.density = number_field(entry, "density_kg_m3");
    e.specific_heat = number_field(entry, "specific_heat_j_kgk");
    e.thermal_conductivity = number_field(entry, "thermal_conductivity_w_mk");
    e.electrical_resistivity = number_field(entry, "resistivity_ohm_m");
    if (entry.contains("sources")) e.sources = entry.at("sources").get<std::vector<std::string>>();
    for (double v : {e.melting_point, e.density, e.specific_heat, e.thermal_conductivity,
                     e.electrical_resistivity}) {
      if (!positive_finite(v)) {
        throw Error(ErrorKind::InvalidDocument, "non-positive value for '" + e.symbol + "'");
      }
    }
    table.elements_.push_back(std::move(e));
  }
  return table;
}

const ElementTable& ElementTable::bundled() {
  static const ElementTable table = from_json(json::parse(bundled::elements_json()));
  return table;
}

const ElementProperties* ElementTable::find(std::string_view symbol) const noexcept {
  for (const auto& e : elements_) {
    if (e.symbol == symbol) return &e;
  }
  return nullptr;
}

const ElementProperties& ElementTable::at(std::string_view symbol) const {
  if (const auto* e = find(symbol)) return *e;
  throw Error(ErrorKind::ElementDataMissing,
              "no elemental data for '" + std::string(symbol) + "'", {{"symbol", symbol}});
}

std::vector<std::string> ElementTable::symbols() const {
  std::vector<std::string> out;
  for (const auto& e : elements_) out.push_back(e.symbol);
  std::sort(out.begin(), out.end());
  return out;
}

// ---------------------------------------------------------------------------
// Config

PhaseTransitions PhaseTransitions::from_bounds(double solidus, double liquidus) {
  return PhaseTransitions{solidus, liquidus, (solidus + liquidus) / 2.0};
}

std::string_view to_string(ProviderKind kind) noexcept {
  return kind == ProviderKind::AlloyTable ? "alloy-table" : "mixture-rule";
}

ProviderKind parse_provider_kind(std::string_view text) {
  if (text == "alloy-table") return ProviderKind::AlloyTable;
  if (text == "mixture-rule") return ProviderKind::MixtureRule;
  throw Error(ErrorKind::InvalidConfig,
              "provider_kind must be 'alloy-table' or 'mixture-rule', got '" + std::string(text) +
                  "'");
}

void ProviderConfig::validate() const {
  if (!std::isfinite(t_min) || !std::isfinite(t_max) || !(t_min < t_max) || t_min <= 0.0) {
    throw Error(ErrorKind::InvalidConfig, "temperature sweep requires 0 < t_min < t_max");
  }
  if (!positive_finite(laser_wavelength)) {
    throw Error(ErrorKind::InvalidConfig, "laser_wavelength must be > 0");
  }
  if (!positive_finite(evaluation_temperature)) {
    throw Error(ErrorKind::InvalidConfig, "evaluation_temperature must be > 0");
  }
  if (!(solidus_liquid_fraction > 0.0 && solidus_liquid_fraction < liquidus_liquid_fraction &&
        liquidus_liquid_fraction < 1.0)) {
    throw Error(ErrorKind::InvalidConfig,
                "liquid-fraction thresholds must satisfy 0 < solidus < liquidus < 1");
  }
}

// ---------------------------------------------------------------------------
// AlloyTableProvider

const AlloyRecord& AlloyTableProvider::resolve(const Composition& composition) const {
  const AlloyRecord* record = database_->match_composition(composition);
  if (record == nullptr) {
    throw Error(ErrorKind::AlloyNotFound,
                "composition does not match any alloy in the table; use the mixture-rule provider",
                {{"composition", composition}});
  }
  if (!record->properties) {
    throw Error(ErrorKind::ElementDataMissing,
                "alloy '" + record->name + "' has no stored properties", {{"alloy", record->name}});
  }
  return *record;
}

PhaseTransitions AlloyTableProvider::phase_transitions(const Composition& composition,
                                                       const ProviderConfig& config) const {
  config.validate();
  const auto& p = *resolve(composition).properties;
  if (p.t_solidus < config.t_min || p.t_liquidus > config.t_max) {
    throw Error(ErrorKind::TransitionsOutOfRange,
                "stored transition temperatures fall outside the sweep range",
                {{"t_solidus", p.t_solidus},
                 {"t_liquidus", p.t_liquidus},
                 {"t_min", config.t_min},
                 {"t_max", config.t_max}});
  }
  return PhaseTransitions::from_bounds(p.t_solidus, p.t_liquidus);
}

TransportProperties AlloyTableProvider::transport_properties(const Composition& composition,
                                                             const ProviderConfig& config) const {
  config.validate();
  const auto& p = *resolve(composition).properties;
  return {p.density, p.specific_heat, p.thermal_conductivity, p.electrical_resistivity};
}

// ---------------------------------------------------------------------------
// MixtureRuleProvider

double MixtureRuleProvider::liquid_fraction(const Composition& composition,
                                            double temperature) const {
  double liquid = 0.0;
  for (const auto& [symbol, fraction] : composition.elements()) {
    if (elements_->at(symbol).melting_point <= temperature) liquid += fraction;
  }
  return liquid;
}

LiquidFractionCurve MixtureRuleProvider::liquid_fraction_curve(const Composition& composition,
                                                               const ProviderConfig& config) const {
  config.validate();
  LiquidFractionCurve curve;
  const auto steps = static_cast<std::size_t>(std::floor(config.t_max - config.t_min));
  curve.temperatures.reserve(steps + 1);
  curve.liquid_fraction.reserve(steps + 1);
  for (std::size_t i = 0; i <= steps; ++i) {
    const double t = config.t_min + static_cast<double>(i);
    curve.temperatures.push_back(t);
    curve.liquid_fraction.push_back(liquid_fraction(composition, t));
  }
  return curve;
}

PhaseTransitions MixtureRuleProvider::phase_transitions(const Composition& composition,
                                                        const ProviderConfig& config) const {
  config.validate();
  std::vector<double> melting_points;
  for (const auto& [symbol, fraction] : composition.elements()) {
    melting_points.push_back(elements_->at(symbol).melting_point);
  }
  std::sort(melting_points.begin(), melting_points.end());

  const auto steps = static_cast<std::size_t>(std::floor(config.t_max - config.t_min));
  auto first_crossing = [&](double threshold) -> double {
    for (std::size_t i = 0; i <= steps; ++i) {
      const double t = config.t_min + static_cast<double>(i);
      if (liquid_fraction(composition, t) <= threshold) continue;
      if (i == 0) break;  // already past the threshold at the bottom of the sweep
      // The staircase jumps only at melting points, so the crossing is the
      // first melting point inside (t - 1, t] that lifts the fraction above
      // the threshold.
      for (double m : melting_points) {
        if (m > t - 1.0 && m <= t && liquid_fraction(composition, m) > threshold) return m;
      }
      return t;
    }
    throw Error(ErrorKind::TransitionsOutOfRange,
                "liquid fraction does not cross " + std::to_string(threshold) +
                    " inside the temperature sweep",
                {{"threshold", threshold}, {"t_min", config.t_min}, {"t_max", config.t_max}});
  };

  const double solidus = first_crossing(config.solidus_liquid_fraction);
  const double liquidus = first_crossing(config.liquidus_liquid_fraction);
  return PhaseTransitions::from_bounds(solidus, liquidus);
}

TransportProperties MixtureRuleProvider::transport_properties(const Composition& composition,
                                                              const ProviderConfig& config) const {
  config.validate();
  TransportProperties out;
  for (const auto& [symbol, fraction] : composition.elements()) {
    const auto& e = elements_->at(symbol);
    out.density += fraction * e.density;
    out.specific_heat += fraction * e.specific_heat;
    out.thermal_conductivity += fraction * e.thermal_conductivity;
    out.electrical_resistivity += fraction * e.electrical_resistivity;
  }
  return out;
}

std::unique_ptr<PropertyProvider> make_provider(ProviderKind kind) {
  if (kind == ProviderKind::AlloyTable) return std::make_unique<AlloyTableProvider>();
  return std::make_unique<MixtureRuleProvider>();
}

PhaseTransitions estimate_phase_transitions(const Composition& composition,
                                            const ProviderConfig& config) {
  return make_provider(config.provider_kind)->phase_transitions(composition, config);
}

TransportProperties estimate_transport_properties(const Composition& composition,
                                                  const ProviderConfig& config) {
  return make_provider(config.provider_kind)->transport_properties(composition, config);
}

// ---------------------------------------------------------------------------
// Absorptivity

AbsorptivityEstimate absorptivity_bramson(double electrical_resistivity, double wavelength) {
  if (!positive_finite(electrical_resistivity) || !positive_finite(wavelength)) {
    throw Error(ErrorKind::NonPositiveInput, "resistivity and wavelength must be > 0",
                {{"resistivity", electrical_resistivity}, {"wavelength", wavelength}});
  }
  const double resistivity_ohm_cm = electrical_resistivity * 100.0;
  const double wavelength_cm = wavelength * 100.0;
  const double x = resistivity_ohm_cm / wavelength_cm;
  const double root = std::sqrt(x);
  const double value = 0.365 * root - 0.0667 * x + 0.006 * x * root;
  if (!(value > 0.0 && value < 1.0)) {
    throw Error(ErrorKind::ResultOutOfUnitInterval,
                "absorptivity estimate outside (0, 1); inputs outside the model's domain",
                {{"value", value}, {"series_argument", x}});
  }
  return {value, x, x > 5.0};
}

// ---------------------------------------------------------------------------
// Database tag

std::string select_database_tag(const Composition& composition) {
  constexpr double eps = 1e-12;
  if (composition.size() == 1) return "PURE5";
  if (composition.fraction("Ni") >= 0.30 - eps) return "TCNI12";

  std::size_t significant = 0;
  double largest = 0.0;
  for (const auto& [symbol, fraction] : composition.elements()) {
    if (fraction >= 0.05 - eps) ++significant;
    largest = std::max(largest, fraction);
  }
  if (significant >= 4 && largest <= 0.5) return "TCHEA7";

  const auto& dominant = composition.dominant_element();
  if (dominant == "Fe") return "TCFE14";
  if (dominant == "Al") return "TCAL9";
  if (dominant == "Ti") return "TCTI6";
  if (dominant == "Ni") return "TCNI12";
  return "PURE5";
}

// ---------------------------------------------------------------------------
// Material

void Material::validate() const {
  auto fail = [](const std::string& what) {
    throw Error(ErrorKind::InvalidDocument, "material invariant violated: " + what);
  };
  if (!positive_finite(thermal_conductivity)) fail("thermal_conductivity > 0");
  if (!positive_finite(density)) fail("density > 0");
  if (!positive_finite(specific_heat)) fail("specific_heat > 0");
  if (!positive_finite(electrical_resistivity)) fail("electrical_resistivity > 0");
  if (!(absorptivity > 0.0 && absorptivity < 1.0)) fail("0 < absorptivity < 1");
  if (!(transitions.t_solidus <= transitions.t_liquidus)) fail("t_solidus <= t_liquidus");
  if (transitions.t_melting != (transitions.t_solidus + transitions.t_liquidus) / 2.0) {
    fail("t_melting is the solidus/liquidus midpoint");
  }
  if (!positive_finite(transitions.t_solidus)) fail("t_solidus > 0");
}

json material_to_json(const Material& m) {
  return {{"schema", "material"},
          {"schema_version", Material::kSchemaVersion},
          {"name", m.name},
          {"composition", m.composition},
          {"thermal_conductivity", m.thermal_conductivity},
          {"density", m.density},
          {"specific_heat", m.specific_heat},
          {"electrical_resistivity", m.electrical_resistivity},
          {"absorptivity", m.absorptivity},
          {"transitions",
           {{"t_solidus", m.transitions.t_solidus},
            {"t_liquidus", m.transitions.t_liquidus},
            {"t_melting", m.transitions.t_melting}}},
          {"evaluation_temperature", m.evaluation_temperature},
          {"provider_kind", to_string(m.provider_kind)},
          {"database_tag", m.database_tag},
          {"absorptivity_warning", m.absorptivity_warning}};
}

Material material_from_json(const json& j) {
  if (!j.is_object() || j.value("schema", std::string{}) != "material") {
    throw Error(ErrorKind::SchemaMismatch, "document is not a material",
                {{"expected", "material"}, {"found", j.is_object() ? j.value("schema", "") : ""}});
  }
  if (!j.contains("composition") || !j.contains("transitions")) {
    throw Error(ErrorKind::InvalidDocument, "material requires composition and transitions");
  }
  const json& t = j.at("transitions");
  Material m{
      .name = j.value("name", std::string{}),
      .composition = j.at("composition").get<Composition>(),
      .thermal_conductivity = number_field(j, "thermal_conductivity"),
      .density = number_field(j, "density"),
      .specific_heat = number_field(j, "specific_heat"),
      .electrical_resistivity = number_field(j, "electrical_resistivity"),
      .absorptivity = number_field(j, "absorptivity"),
      .transitions = {number_field(t, "t_solidus"), number_field(t, "t_liquidus"),
                      number_field(t, "t_melting")},
      .evaluation_temperature = number_field(j, "evaluation_temperature"),
      .provider_kind = parse_provider_kind(j.value("provider_kind", "alloy-table")),
      .database_tag = j.value("database_tag", std::string{}),
      .absorptivity_warning = j.value("absorptivity_warning", false),
  };
  m.validate();
  return m;
}

Material build_material(std::string name, const Composition& composition,
                        const ProviderConfig& config,
                        std::optional<PhaseTransitions> known_transitions) {
  config.validate();
  auto provider = make_provider(config.provider_kind);
  const PhaseTransitions transitions =
      known_transitions ? *known_transitions : provider->phase_transitions(composition, config);
  const TransportProperties transport = provider->transport_properties(composition, config);
  const AbsorptivityEstimate absorptivity =
      absorptivity_bramson(transport.electrical_resistivity, config.laser_wavelength);

  Material m{
      .name = std::move(name),
      .composition = composition,
      .thermal_conductivity = transport.thermal_conductivity,
      .density = transport.density,
      .specific_heat = transport.specific_heat,
      .electrical_resistivity = transport.electrical_resistivity,
      .absorptivity = absorptivity.value,
      .transitions = transitions,
      .evaluation_temperature = config.evaluation_temperature,
      .provider_kind = config.provider_kind,
      .database_tag = select_database_tag(composition),
      .absorptivity_warning = absorptivity.warning,
  };
  m.validate();
  return m;
}

}  // namespace printmap
