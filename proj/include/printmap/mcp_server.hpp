#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>

#include "printmap/tools.hpp"

namespace printmap {

/// JSON-RPC 2.0 over newline-delimited stdio, speaking the MCP method set:
/// initialize, ping, tools/list, tools/call, resources/list, resources/read.
class McpServer {
 public:
  static constexpr const char* kServerName = "printmap";
  static constexpr const char* kServerVersion = "1.0.0";
  static constexpr const char* kDefaultProtocolVersion = "2025-06-18";

  explicit McpServer(ToolCatalog& catalog);

  /// One response (or none, for notifications) per message.
  std::optional<json> handle(const json& message);
  /// Parses one line; malformed JSON yields a -32700 response.
  std::optional<std::string> handle_line(std::string_view line);
  /// Reads until end of input, answering each request in arrival order.
  void serve(std::istream& in, std::ostream& out);

  bool initialized() const noexcept { return initialized_; }
  const std::string& protocol_version() const noexcept { return protocol_version_; }

 private:
  json dispatch(const std::string& method, const json& params);
  json list_resources() const;
  json read_resource(const std::string& uri) const;

  ToolCatalog* catalog_;
  bool initialized_ = false;
  std::string protocol_version_ = kDefaultProtocolVersion;
};

}  // namespace printmap
