#include "printmap/error.hpp"

namespace printmap {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::EmptyComposition: return "EmptyComposition";
    case ErrorKind::UnknownElement: return "UnknownElement";
    case ErrorKind::NonPositiveFraction: return "NonPositiveFraction";
    case ErrorKind::InvalidComposition: return "InvalidComposition";
    case ErrorKind::AlloyNotFound: return "AlloyNotFound";
    case ErrorKind::ElementDataMissing: return "ElementDataMissing";
    case ErrorKind::TransitionsOutOfRange: return "TransitionsOutOfRange";
    case ErrorKind::NonPositiveInput: return "NonPositiveInput";
    case ErrorKind::ResultOutOfUnitInterval: return "ResultOutOfUnitInterval";
    case ErrorKind::OriginSingularity: return "OriginSingularity";
    case ErrorKind::NonPositiveDeltaT: return "NonPositiveDeltaT";
    case ErrorKind::MeltPoolVanishes: return "MeltPoolVanishes";
    case ErrorKind::ZeroMeltPoolDimension: return "ZeroMeltPoolDimension";
    case ErrorKind::InvalidConfig: return "InvalidConfig";
    case ErrorKind::InvalidRange: return "InvalidRange";
    case ErrorKind::InvalidName: return "InvalidName";
    case ErrorKind::WorkspaceNotFound: return "WorkspaceNotFound";
    case ErrorKind::DocumentNotFound: return "DocumentNotFound";
    case ErrorKind::UnknownSubfolder: return "UnknownSubfolder";
    case ErrorKind::SchemaMismatch: return "SchemaMismatch";
    case ErrorKind::InvalidDocument: return "InvalidDocument";
    case ErrorKind::MalformedUri: return "MalformedUri";
    case ErrorKind::Busy: return "Busy";
    case ErrorKind::IoFailure: return "IoFailure";
    case ErrorKind::UnwritablePath: return "UnwritablePath";
    case ErrorKind::UnknownTool: return "UnknownTool";
    case ErrorKind::ArgumentValidation: return "ArgumentValidation";
  }
  return "Unknown";
}

}  // namespace printmap
