#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

#include <json.hpp>

namespace printmap {

using json = nlohmann::json;

enum class ErrorKind {
  EmptyComposition,
  UnknownElement,
  NonPositiveFraction,
  InvalidComposition,
  AlloyNotFound,
  ElementDataMissing,
  TransitionsOutOfRange,
  NonPositiveInput,
  ResultOutOfUnitInterval,
  OriginSingularity,
  NonPositiveDeltaT,
  MeltPoolVanishes,
  ZeroMeltPoolDimension,
  InvalidConfig,
  InvalidRange,
  InvalidName,
  WorkspaceNotFound,
  DocumentNotFound,
  UnknownSubfolder,
  SchemaMismatch,
  InvalidDocument,
  MalformedUri,
  Busy,
  IoFailure,
  UnwritablePath,
  UnknownTool,
  ArgumentValidation,
};

std::string_view to_string(ErrorKind kind) noexcept;

// Every library failure surfaces as this exception; `kind()` is the stable
// machine-readable name used by the CLI and the tool envelopes.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message, json details = json::object())
      : std::runtime_error(message), kind_(kind), details_(std::move(details)) {}

  ErrorKind kind() const noexcept { return kind_; }
  std::string_view kind_name() const noexcept { return to_string(kind_); }
  const json& details() const noexcept { return details_; }

 private:
  ErrorKind kind_;
  json details_;
};

}  // namespace printmap
