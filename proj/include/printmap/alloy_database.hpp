#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "printmap/composition.hpp"

namespace printmap {

/// Datasheet values stored alongside an alloy, SI units.
struct ReferenceProperties {
  double thermal_conductivity = 0.0;    // W/(m K)
  double density = 0.0;                 // kg/m^3
  double specific_heat = 0.0;           // J/(kg K)
  double electrical_resistivity = 0.0;  // Ohm m
  double t_solidus = 0.0;               // K
  double t_liquidus = 0.0;              // K
  double reference_temperature = 298.15;

  bool operator==(const ReferenceProperties&) const = default;
};

struct AlloyRecord {
  std::string name;
  std::vector<std::string> aliases;
  Composition composition;
  std::optional<ReferenceProperties> properties;
  std::string source_tag;

  bool operator==(const AlloyRecord&) const = default;
};

json alloy_record_to_json(const AlloyRecord& record);
AlloyRecord alloy_record_from_json(const json& j);

/// Lowercase with whitespace, hyphens, underscores and dots removed, so
/// "Stainless Steel 316L", "stainless-steel-316l" and "SS 316L" compare by
/// their letters and digits only.
std::string fold_alloy_name(std::string_view name);

std::size_t edit_distance(std::string_view a, std::string_view b);

class AlloyDatabase {
 public:
  static constexpr int kSchemaVersion = 1;

  /// Parses the `alloys.json` document ({"schema_version": 1, "alloys": [...]}).
  static AlloyDatabase from_json(const json& document);

  /// The table shipped with the library (or `$PRINTMAP_DATA_DIR/alloys.json`).
  static const AlloyDatabase& bundled();

  json to_json() const;

  /// Case-insensitive, alias-aware. Throws AlloyNotFound with the three
  /// closest canonical names in `details()["suggestions"]`.
  const AlloyRecord& lookup(std::string_view name) const;
  const AlloyRecord* find(std::string_view name) const noexcept;

  /// First record whose composition matches per element within `tolerance`.
  const AlloyRecord* match_composition(const Composition& composition,
                                       double tolerance = 1e-9) const noexcept;

  /// Canonical names, sorted.
  std::vector<std::string> names() const;

  std::span<const AlloyRecord> records() const noexcept { return records_; }

 private:
  std::vector<AlloyRecord> records_;
};

const AlloyRecord& lookup_alloy(std::string_view name);
std::vector<std::string> list_known_alloys();

}  // namespace printmap
