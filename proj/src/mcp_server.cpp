#include "printmap/mcp_server.hpp"

#include <array>
#include <istream>
#include <ostream>

namespace printmap {

namespace {

constexpr int kParseError = -32700;
constexpr int kInvalidRequest = -32600;
constexpr int kMethodNotFound = -32601;
constexpr int kInvalidParams = -32602;
constexpr int kServerError = -32002;

constexpr std::array<const char*, 3> kSupportedVersions = {"2025-06-18", "2025-03-26",
                                                           "2024-11-05"};

// Raised inside dispatch and turned into a JSON-RPC error object.
struct RpcError {
  int code;
  std::string message;
  json data;
};

json error_response(const json& id, int code, const std::string& message, const json& data = {}) {
  json error = {{"code", code}, {"message", message}};
  if (!data.is_null()) error["data"] = data;
  return {{"jsonrpc", "2.0"}, {"id", id}, {"error", std::move(error)}};
}

std::string require_string_param(const json& params, const char* key) {
  if (!params.is_object() || !params.contains(key) || !params.at(key).is_string()) {
    throw RpcError{kInvalidParams, std::string("params.") + key + " must be a string", {}};
  }
  return params.at(key).get<std::string>();
}

}  // namespace

McpServer::McpServer(ToolCatalog& catalog) : catalog_(&catalog) {}

std::optional<std::string> McpServer::handle_line(std::string_view line) {
  json message;
  try {
    message = json::parse(line);
  } catch (const json::parse_error&) {
    return error_response(nullptr, kParseError, "Parse error").dump();
  }
  auto response = handle(message);
  if (!response) return std::nullopt;
  return response->dump();
}

std::optional<json> McpServer::handle(const json& message) {
  if (!message.is_object()) return error_response(nullptr, kInvalidRequest, "Invalid Request");

  const bool has_id = message.contains("id");
  const json id = has_id ? message.at("id") : json();
  if (has_id && !(id.is_string() || id.is_number_integer())) {
    return error_response(nullptr, kInvalidRequest, "Invalid Request: id must be a string or integer");
  }
  if (message.value("jsonrpc", json()) != "2.0" || !message.contains("method") ||
      !message.at("method").is_string()) {
    return has_id || !message.contains("method")
               ? std::optional<json>(error_response(id, kInvalidRequest, "Invalid Request"))
               : std::nullopt;
  }

  const std::string method = message.at("method").get<std::string>();
  const json params = message.contains("params") ? message.at("params") : json::object();

  if (!has_id) {
    // Notifications never get a response.
    if (method == "notifications/initialized") initialized_ = true;
    return std::nullopt;
  }
  if (!params.is_object()) return error_response(id, kInvalidParams, "params must be an object");

  try {
    return json{{"jsonrpc", "2.0"}, {"id", id}, {"result", dispatch(method, params)}};
  } catch (const RpcError& e) {
    return error_response(id, e.code, e.message, e.data);
  }
}

json McpServer::dispatch(const std::string& method, const json& params) {
  if (method == "initialize") {
    const std::string requested = params.value("protocolVersion", std::string{});
    protocol_version_ = kDefaultProtocolVersion;
    for (const char* v : kSupportedVersions) {
      if (requested == v) protocol_version_ = v;
    }
    initialized_ = true;
    return {{"protocolVersion", protocol_version_},
            {"capabilities",
             {{"tools", {{"listChanged", false}}},
              {"resources", {{"subscribe", false}, {"listChanged", false}}}}},
            {"serverInfo", {{"name", kServerName}, {"version", kServerVersion}}},
            {"instructions",
             "Laser powder bed fusion printability tools. Create a workspace, a composition, a "
             "material and a build configuration, then initialize and generate a process map."}};
  }
  if (method == "ping") return json::object();

  const bool known = method == "tools/list" || method == "tools/call" ||
                     method == "resources/list" || method == "resources/read";
  if (!known) throw RpcError{kMethodNotFound, "Method not found: " + method, {}};
  if (!initialized_) throw RpcError{kServerError, "Server not initialized", {}};

  if (method == "tools/list") {
    json tools = json::array();
    for (const auto& d : catalog_->descriptors()) tools.push_back(tool_descriptor_to_json(d));
    return {{"tools", std::move(tools)}};
  }
  if (method == "tools/call") {
    const std::string name = require_string_param(params, "name");
    const json arguments = params.contains("arguments") ? params.at("arguments") : json::object();
    if (!arguments.is_object()) throw RpcError{kInvalidParams, "params.arguments must be an object", {}};
    const ToolEnvelope envelope = catalog_->call(name, arguments);
    const json structured = envelope.to_json();
    return {{"content", {{{"type", "text"}, {"text", structured.dump()}}}},
            {"structuredContent", structured},
            {"isError", !envelope.ok}};
  }
  if (method == "resources/list") return list_resources();
  return read_resource(require_string_param(params, "uri"));
}

json McpServer::list_resources() const {
  json resources = json::array();
  const WorkspaceStore& store = catalog_->store();
  try {
    for (const auto& ws : store.list_workspaces()) {
      for (Subfolder s : kAllSubfolders) {
        const std::string sub(to_string(s));
        resources.push_back({{"uri", "workspace://" + ws + "/" + sub + "/"},
                             {"name", ws + "/" + sub},
                             {"description", "Documents in the " + sub + " subfolder of " + ws},
                             {"mimeType", "application/json"}});
      }
    }
  } catch (const Error& e) {
    throw RpcError{kServerError, e.what(), {{"error_kind", e.kind_name()}}};
  }
  return {{"resources", std::move(resources)}};
}

json McpServer::read_resource(const std::string& uri) const {
  const WorkspaceStore& store = catalog_->store();
  try {
    const ResourceUri parsed = parse_resource_uri(uri);
    json payload;
    if (parsed.filename) {
      DocumentRef ref{parsed.workspace, parsed.subfolder, *parsed.filename};
      ref.validate();
      payload = store.load_document(ref);
    } else {
      payload = subfolder_listing(store, parsed.workspace, parsed.subfolder);
    }
    return {{"contents",
             {{{"uri", uri}, {"mimeType", "application/json"}, {"text", payload.dump()}}}}};
  } catch (const Error& e) {
    const int code = e.kind() == ErrorKind::MalformedUri ? kInvalidParams : kServerError;
    throw RpcError{code, e.what(), {{"error_kind", e.kind_name()}, {"uri", uri}}};
  }
}

void McpServer::serve(std::istream& in, std::ostream& out) {
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    if (auto response = handle_line(line)) out << *response << '\n' << std::flush;
  }
}

}  // namespace printmap
