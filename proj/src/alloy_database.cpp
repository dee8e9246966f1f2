#include "printmap/alloy_database.hpp"

#include <algorithm>
#include <cctype>
#include <numeric>
#include <set>

#include "printmap/bundled_data.hpp"

namespace printmap {

namespace {

double require_number(const json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_number()) {
    throw Error(ErrorKind::InvalidDocument, std::string("missing numeric field '") + key + "'",
                {{"field", key}});
  }
  return j.at(key).get<double>();
}

std::string require_string(const json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_string()) {
    throw Error(ErrorKind::InvalidDocument, std::string("missing string field '") + key + "'",
                {{"field", key}});
  }
  return j.at(key).get<std::string>();
}

json properties_to_json(const ReferenceProperties& p) {
  return {{"thermal_conductivity_w_mk", p.thermal_conductivity},
          {"density_kg_m3", p.density},
          {"specific_heat_j_kgk", p.specific_heat},
          {"resistivity_ohm_m", p.electrical_resistivity},
          {"t_solidus_k", p.t_solidus},
          {"t_liquidus_k", p.t_liquidus},
          {"reference_temperature_k", p.reference_temperature}};
}

ReferenceProperties properties_from_json(const json& j) {
  ReferenceProperties p;
  p.thermal_conductivity = require_number(j, "thermal_conductivity_w_mk");
  p.density = require_number(j, "density_kg_m3");
  p.specific_heat = require_number(j, "specific_heat_j_kgk");
  p.electrical_resistivity = require_number(j, "resistivity_ohm_m");
  p.t_solidus = require_number(j, "t_solidus_k");
  p.t_liquidus = require_number(j, "t_liquidus_k");
  p.reference_temperature = j.value("reference_temperature_k", 298.15);
  if (p.t_solidus > p.t_liquidus) {
    throw Error(ErrorKind::InvalidDocument, "solidus above liquidus");
  }
  return p;
}

}  // namespace

json alloy_record_to_json(const AlloyRecord& record) {
  json j = {{"name", record.name},
            {"aliases", record.aliases},
            {"composition", record.composition},
            {"source_tag", record.source_tag}};
  if (record.properties) j["properties"] = properties_to_json(*record.properties);
  return j;
}

AlloyRecord alloy_record_from_json(const json& j) {
  std::vector<std::string> aliases;
  if (j.contains("aliases")) aliases = j.at("aliases").get<std::vector<std::string>>();
  std::optional<ReferenceProperties> properties;
  if (j.contains("properties") && !j.at("properties").is_null()) {
    properties = properties_from_json(j.at("properties"));
  }
  if (!j.contains("composition")) {
    throw Error(ErrorKind::InvalidDocument, "alloy record without composition");
  }
  return AlloyRecord{require_string(j, "name"), std::move(aliases),
                     j.at("composition").get<Composition>(), properties,
                     j.value("source_tag", std::string{})};
}

std::string fold_alloy_name(std::string_view name) {
  std::string folded;
  folded.reserve(name.size());
  for (char c : name) {
    auto u = static_cast<unsigned char>(c);
    if (std::isspace(u) || c == '-' || c == '_' || c == '.') continue;
    folded.push_back(static_cast<char>(std::tolower(u)));
  }
  return folded;
}

std::size_t edit_distance(std::string_view a, std::string_view b) {
  std::vector<std::size_t> row(b.size() + 1);
  std::iota(row.begin(), row.end(), std::size_t{0});
  for (std::size_t i = 1; i <= a.size(); ++i) {
    std::size_t diagonal = row[0];
    row[0] = i;
    for (std::size_t k = 1; k <= b.size(); ++k) {
      std::size_t above = row[k];
      row[k] = std::min({row[k] + 1, row[k - 1] + 1, diagonal + (a[i - 1] == b[k - 1] ? 0 : 1)});
      diagonal = above;
    }
  }
  return row[b.size()];
}

AlloyDatabase AlloyDatabase::from_json(const json& document) {
  if (!document.is_object() || !document.contains("schema_version")) {
    throw Error(ErrorKind::InvalidDocument, "alloy database requires 'schema_version'");
  }
  if (document.at("schema_version") != kSchemaVersion) {
    throw Error(ErrorKind::SchemaMismatch, "unsupported alloy database schema_version",
                {{"expected", kSchemaVersion}, {"found", document.at("schema_version")}});
  }
  AlloyDatabase db;
  std::set<std::string> seen;
  for (const auto& entry : document.at("alloys")) {
    auto record = alloy_record_from_json(entry);
    if (!seen.insert(fold_alloy_name(record.name)).second) {
      throw Error(ErrorKind::InvalidDocument, "duplicate alloy name '" + record.name + "'");
    }
    db.records_.push_back(std::move(record));
  }
  return db;
}

const AlloyDatabase& AlloyDatabase::bundled() {
  static const AlloyDatabase db = from_json(json::parse(bundled::alloys_json()));
  return db;
}

json AlloyDatabase::to_json() const {
  json alloys = json::array();
  for (const auto& record : records_) alloys.push_back(alloy_record_to_json(record));
  return {{"schema_version", kSchemaVersion}, {"alloys", std::move(alloys)}};
}

const AlloyRecord* AlloyDatabase::find(std::string_view name) const noexcept {
  const std::string key = fold_alloy_name(name);
  if (key.empty()) return nullptr;
  for (const auto& record : records_) {
    if (fold_alloy_name(record.name) == key) return &record;
  }
  for (const auto& record : records_) {
    for (const auto& alias : record.aliases) {
      if (fold_alloy_name(alias) == key) return &record;
    }
  }
  return nullptr;
}

const AlloyRecord& AlloyDatabase::lookup(std::string_view name) const {
  if (const auto* record = find(name)) return *record;

  const std::string key = fold_alloy_name(name);
  std::vector<std::pair<std::size_t, std::string>> ranked;
  for (const auto& record : records_) {
    std::size_t best = edit_distance(key, fold_alloy_name(record.name));
    for (const auto& alias : record.aliases) {
      best = std::min(best, edit_distance(key, fold_alloy_name(alias)));
    }
    ranked.emplace_back(best, record.name);
  }
  std::sort(ranked.begin(), ranked.end());
  json suggestions = json::array();
  for (std::size_t i = 0; i < ranked.size() && i < 3; ++i) suggestions.push_back(ranked[i].second);
  throw Error(ErrorKind::AlloyNotFound, "no known alloy named '" + std::string(name) + "'",
              {{"name", name}, {"suggestions", suggestions}});
}

const AlloyRecord* AlloyDatabase::match_composition(const Composition& composition,
                                                    double tolerance) const noexcept {
  for (const auto& record : records_) {
    if (record.composition.approx_equal(composition, tolerance)) return &record;
  }
  return nullptr;
}

std::vector<std::string> AlloyDatabase::names() const {
  std::vector<std::string> out;
  out.reserve(records_.size());
  for (const auto& record : records_) out.push_back(record.name);
  std::sort(out.begin(), out.end());
  return out;
}

const AlloyRecord& lookup_alloy(std::string_view name) {
  return AlloyDatabase::bundled().lookup(name);
}

std::vector<std::string> list_known_alloys() { return AlloyDatabase::bundled().names(); }

}  // namespace printmap
