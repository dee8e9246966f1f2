#pragma once

#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "printmap/workspace.hpp"

namespace printmap {

struct ToolDescriptor {
  std::string name;
  std::string title;
  std::string description;
  json input_schema;
  bool structured_output = true;
};

/// Result of one tool call: a value on success, a named error otherwise.
struct ToolEnvelope {
  bool ok = true;
  json value;
  std::string error_kind;
  std::string message;
  json details;

  static ToolEnvelope success(json value);
  static ToolEnvelope failure(std::string kind, std::string message, json details = {});
  static ToolEnvelope failure(const Error& error);

  /// {"status":"success","value":...} or
  /// {"status":"error","error_kind":...,"message":...[,"details":...]}
  json to_json() const;
};

/// JSON descriptor as advertised by tools/list.
json tool_descriptor_to_json(const ToolDescriptor& descriptor);

/// The tool surface over one workspace store. Every call validates its
/// arguments against the advertised schema before running.
class ToolCatalog {
 public:
  explicit ToolCatalog(WorkspaceStore& store);

  const std::vector<ToolDescriptor>& descriptors() const noexcept { return descriptors_; }
  const ToolDescriptor* find(std::string_view name) const noexcept;

  /// Never throws; failures come back as error envelopes.
  ToolEnvelope call(std::string_view name, const json& arguments) const;

  WorkspaceStore& store() const noexcept { return *store_; }

 private:
  using Handler = std::function<json(const json&)>;
  void add(ToolDescriptor descriptor, Handler handler);

  WorkspaceStore* store_;
  std::vector<ToolDescriptor> descriptors_;
  std::vector<Handler> handlers_;
};

/// Accepts "workspace://ws/sub/file.json" (optionally with a leading '@'),
/// or a bare filename resolved in `default_subfolder` of `workspace`. A
/// missing ".json" suffix is added. Throws MalformedUri (also for a bare
/// name without a workspace) or InvalidName.
DocumentRef resolve_document_ref(std::string_view text, const std::optional<std::string>& workspace,
                                 Subfolder default_subfolder);

/// Listing payload shared by the workspace_contents tool and resources/read.
json subfolder_listing(const WorkspaceStore& store, std::string_view workspace,
                       Subfolder subfolder);

}  // namespace printmap
