#include "printmap/composition.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace printmap {

namespace {

constexpr std::array<std::string_view, 118> kElementSymbols = {
    "H",  "He", "Li", "Be", "B",  "C",  "N",  "O",  "F",  "Ne", "Na", "Mg", "Al", "Si", "P",
    "S",  "Cl", "Ar", "K",  "Ca", "Sc", "Ti", "V",  "Cr", "Mn", "Fe", "Co", "Ni", "Cu", "Zn",
    "Ga", "Ge", "As", "Se", "Br", "Kr", "Rb", "Sr", "Y",  "Zr", "Nb", "Mo", "Tc", "Ru", "Rh",
    "Pd", "Ag", "Cd", "In", "Sn", "Sb", "Te", "I",  "Xe", "Cs", "Ba", "La", "Ce", "Pr", "Nd",
    "Pm", "Sm", "Eu", "Gd", "Tb", "Dy", "Ho", "Er", "Tm", "Yb", "Lu", "Hf", "Ta", "W",  "Re",
    "Os", "Ir", "Pt", "Au", "Hg", "Tl", "Pb", "Bi", "Po", "At", "Rn", "Fr", "Ra", "Ac", "Th",
    "Pa", "U",  "Np", "Pu", "Am", "Cm", "Bk", "Cf", "Es", "Fm", "Md", "No", "Lr", "Rf", "Db",
    "Sg", "Bh", "Hs", "Mt", "Ds", "Rg", "Cn", "Nh", "Fl", "Mc", "Lv", "Ts", "Og"};

void check_entry(const std::string& symbol, double value) {
  if (!is_element_symbol(symbol)) {
    throw Error(ErrorKind::UnknownElement, "unknown element symbol '" + symbol + "'",
                {{"symbol", symbol}});
  }
  if (!std::isfinite(value) || value <= 0.0) {
    throw Error(ErrorKind::NonPositiveFraction,
                "fraction for '" + symbol + "' must be finite and > 0", {{"symbol", symbol}});
  }
}

}  // namespace

bool is_element_symbol(std::string_view symbol) noexcept {
  return std::find(kElementSymbols.begin(), kElementSymbols.end(), symbol) !=
         kElementSymbols.end();
}

Composition Composition::from_normalized(Map fractions) {
  if (fractions.empty()) {
    throw Error(ErrorKind::EmptyComposition, "composition has no elements");
  }
  double sum = 0.0;
  for (const auto& [symbol, value] : fractions) {
    check_entry(symbol, value);
    if (value > 1.0) {
      throw Error(ErrorKind::InvalidComposition,
                  "mass fraction for '" + symbol + "' exceeds 1", {{"symbol", symbol}});
    }
    sum += value;
  }
  if (std::abs(sum - 1.0) > kSumTolerance) {
    throw Error(ErrorKind::InvalidComposition, "mass fractions sum to " + std::to_string(sum),
                {{"sum", sum}});
  }
  return Composition(std::move(fractions));
}

double Composition::fraction(std::string_view symbol) const noexcept {
  auto it = fractions_.find(symbol);
  return it == fractions_.end() ? 0.0 : it->second;
}

const std::string& Composition::dominant_element() const {
  auto best = fractions_.begin();
  for (auto it = fractions_.begin(); it != fractions_.end(); ++it) {
    if (it->second > best->second) best = it;
  }
  return best->first;
}

bool Composition::approx_equal(const Composition& other, double tolerance) const noexcept {
  for (const auto& [symbol, value] : fractions_) {
    if (std::abs(value - other.fraction(symbol)) > tolerance) return false;
  }
  for (const auto& [symbol, value] : other.fractions_) {
    if (std::abs(value - fraction(symbol)) > tolerance) return false;
  }
  return true;
}

Composition parse_composition(const std::map<std::string, double>& amounts) {
  if (amounts.empty()) {
    throw Error(ErrorKind::EmptyComposition, "composition has no elements");
  }
  double sum = 0.0;
  for (const auto& [symbol, value] : amounts) {
    check_entry(symbol, value);
    sum += value;
  }
  Composition::Map normalized;
  for (const auto& [symbol, value] : amounts) normalized.emplace(symbol, value / sum);
  return Composition::from_normalized(std::move(normalized));
}

Composition parse_composition(const json& amounts) {
  if (!amounts.is_object()) {
    throw Error(ErrorKind::InvalidComposition,
                "composition must be a JSON object of element symbol to mass fraction");
  }
  std::map<std::string, double> raw;
  for (const auto& [symbol, value] : amounts.items()) {
    if (!value.is_number()) {
      throw Error(ErrorKind::NonPositiveFraction, "fraction for '" + symbol + "' is not a number",
                  {{"symbol", symbol}});
    }
    raw.emplace(symbol, value.get<double>());
  }
  return parse_composition(raw);
}

json composition_to_json(const Composition& c) {
  json j = json::object();
  for (const auto& [symbol, value] : c.elements()) j[symbol] = value;
  return j;
}

Composition composition_from_json(const json& j) {
  if (!j.is_object()) {
    throw Error(ErrorKind::InvalidComposition, "composition must be a JSON object");
  }
  Composition::Map fractions;
  for (const auto& [symbol, value] : j.items()) {
    if (!value.is_number()) {
      throw Error(ErrorKind::NonPositiveFraction, "fraction for '" + symbol + "' is not a number",
                  {{"symbol", symbol}});
    }
    fractions.emplace(symbol, value.get<double>());
  }
  return Composition::from_normalized(std::move(fractions));
}

}  // namespace printmap
