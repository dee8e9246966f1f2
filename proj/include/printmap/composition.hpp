#pragma once

#include <functional>
#include <map>
#include <string>
#include <string_view>

#include "printmap/error.hpp"

namespace printmap {

/// True for the symbols H through Og. Case-sensitive ("Fe", not "FE").
bool is_element_symbol(std::string_view symbol) noexcept;

/// Element symbol to mass fraction, normalized to sum to one.
///
/// Instances only come out of `parse_composition` (which normalizes raw
/// amounts) or `Composition::from_normalized` (which validates an already
/// normalized map and keeps the values bit-for-bit).
class Composition {
 public:
  using Map = std::map<std::string, double, std::less<>>;

  static constexpr double kSumTolerance = 1e-9;

  static Composition from_normalized(Map fractions);

  const Map& elements() const noexcept { return fractions_; }
  std::size_t size() const noexcept { return fractions_.size(); }

  /// Zero for absent elements.
  double fraction(std::string_view symbol) const noexcept;

  /// Largest mass fraction; ties resolve to the alphabetically first symbol.
  const std::string& dominant_element() const;

  /// Per-element equality within `tolerance` over the union of both key sets.
  bool approx_equal(const Composition& other, double tolerance) const noexcept;

  bool operator==(const Composition&) const = default;

 private:
  explicit Composition(Map fractions) : fractions_(std::move(fractions)) {}
  Map fractions_;
};

Composition parse_composition(const std::map<std::string, double>& amounts);

/// Accepts a JSON object of symbol to positive number.
Composition parse_composition(const json& amounts);

json composition_to_json(const Composition& c);
Composition composition_from_json(const json& j);

}  // namespace printmap

template <>
struct nlohmann::adl_serializer<printmap::Composition> {
  static void to_json(json& j, const printmap::Composition& c) {
    j = printmap::composition_to_json(c);
  }
  static printmap::Composition from_json(const json& j) {
    return printmap::composition_from_json(j);
  }
};
