#pragma once

#include <array>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "printmap/error.hpp"

namespace printmap {

enum class Subfolder {
  Compositions,
  Materials,
  BuildConfigs,
  ProcessMaps,
  PropertyDiagrams,
  PhaseTransitionTemperatures,
};

inline constexpr std::array<Subfolder, 6> kAllSubfolders = {
    Subfolder::Compositions,     Subfolder::Materials,        Subfolder::BuildConfigs,
    Subfolder::ProcessMaps,      Subfolder::PropertyDiagrams, Subfolder::PhaseTransitionTemperatures,
};

std::string_view to_string(Subfolder subfolder) noexcept;
/// Throws UnknownSubfolder.
Subfolder parse_subfolder(std::string_view name);

/// [A-Za-z0-9_-]+
bool is_valid_workspace_name(std::string_view name) noexcept;

/// One or two '/'-separated components of [A-Za-z0-9_.-]+, none starting
/// with '.', the last ending in ".json". Two components address a file in a
/// run directory (process_maps/<run>/<file>.json).
bool is_valid_document_filename(std::string_view filename) noexcept;

struct DocumentRef {
  std::string workspace;
  Subfolder subfolder = Subfolder::Compositions;
  std::string filename;

  /// workspace://<workspace>/<subfolder>/<filename>
  std::string uri() const;
  /// Filename without directory and ".json".
  std::string stem() const;

  /// Throws InvalidName.
  void validate() const;

  /// Throws MalformedUri (also when the URI names a folder, not a file).
  static DocumentRef from_uri(std::string_view uri);

  bool operator==(const DocumentRef&) const = default;
};

json document_ref_to_json(const DocumentRef& ref);

struct ResourceUri {
  std::string workspace;
  Subfolder subfolder = Subfolder::Compositions;
  std::optional<std::string> filename;

  bool operator==(const ResourceUri&) const = default;
};

/// Parses workspace://<ws>/<subfolder>/[<file>], with an optional leading '@'.
/// Throws MalformedUri.
ResourceUri parse_resource_uri(std::string_view uri);

/// Schema gate applied to every document saved into or loaded from a
/// subfolder.
struct DocumentSchema {
  std::string name;
  Subfolder subfolder;
  int version = 1;
  std::function<void(const json&)> validate;  // throws on invalid content
};

/// Every schema the artifact stores. Defined next to the document types.
const std::vector<DocumentSchema>& document_schemas();

/// Exclusive advisory lock on <workspace>/.lock (flock). Move-only.
class WriterLock {
 public:
  WriterLock(WriterLock&& other) noexcept;
  WriterLock& operator=(WriterLock&& other) noexcept;
  WriterLock(const WriterLock&) = delete;
  WriterLock& operator=(const WriterLock&) = delete;
  ~WriterLock();

  const std::string& workspace() const noexcept { return workspace_; }

 private:
  friend class WorkspaceStore;
  WriterLock(int fd, std::string workspace) : fd_(fd), workspace_(std::move(workspace)) {}
  int fd_ = -1;
  std::string workspace_;
};

struct Workspace {
  std::string name;
  std::filesystem::path root_path;
  std::vector<std::string> subfolders;
};

struct StoreOptions {
  /// Called after the temporary file is fully written and before it is
  /// renamed over the target. Test hook for crash injection.
  std::function<void(const std::filesystem::path& temp, const std::filesystem::path& target)>
      before_commit;
};

/// Named workspaces under one root directory:
///   <root>/<workspace>/<subfolder>/<file>.json
class WorkspaceStore {
 public:
  static constexpr const char* kRootEnvVar = "PRINTMAP_WORKSPACE_ROOT";

  explicit WorkspaceStore(std::filesystem::path root, StoreOptions options = {});

  /// Root from $PRINTMAP_WORKSPACE_ROOT, default ./workspaces.
  static WorkspaceStore from_environment();

  const std::filesystem::path& root() const noexcept { return root_; }

  /// Creates the workspace and all subfolders; a no-op for an existing one.
  Workspace init_workspace(std::string_view name);
  Workspace open_workspace(std::string_view name) const;
  std::vector<std::string> list_workspaces() const;
  bool has_workspace(std::string_view name) const;

  /// Sorted ".json" filenames; for process_maps also "<run>/<file>.json".
  std::vector<std::string> list_contents(std::string_view workspace, Subfolder subfolder) const;
  std::vector<std::string> list_contents(std::string_view workspace,
                                         std::string_view subfolder) const;

  /// Throws Busy when another writer holds the lock.
  WriterLock lock_for_writing(std::string_view workspace) const;

  /// Atomic write (temp file + rename). Acquires the writer lock itself.
  DocumentRef save_document(const DocumentRef& ref, json payload);
  /// Same, under a lock the caller already holds for this workspace.
  DocumentRef save_document(const DocumentRef& ref, json payload, const WriterLock& lock);

  json load_document(const DocumentRef& ref) const;
  bool document_exists(const DocumentRef& ref) const;
  void remove_document(const DocumentRef& ref, const WriterLock& lock);

  /// Absolute path of a document, checked to stay inside the root.
  std::filesystem::path resolve(const DocumentRef& ref) const;
  std::filesystem::path workspace_path(std::string_view name) const;

 private:
  void require_workspace(std::string_view name) const;
  void check_schema(const DocumentRef& ref, const json& payload) const;
  void check_inside_root(const std::filesystem::path& path) const;

  std::filesystem::path root_;
  StoreOptions options_;
};

}  // namespace printmap
