#include "printmap/workspace.hpp"

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <sstream>

namespace printmap {

namespace fs = std::filesystem;

namespace {

constexpr std::string_view kScheme = "workspace://";
constexpr const char* kLockFile = ".lock";

bool is_name_char(char c) noexcept {
  return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_' ||
         c == '-';
}

bool is_valid_component(std::string_view part) noexcept {
  if (part.empty() || part.front() == '.' || part.size() > 128) return false;
  return std::all_of(part.begin(), part.end(), [](char c) { return is_name_char(c) || c == '.'; });
}

bool ends_with_json(std::string_view name) noexcept {
  return name.size() > 5 && name.substr(name.size() - 5) == ".json";
}

std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    auto pos = text.find(sep, start);
    if (pos == std::string_view::npos) {
      parts.push_back(text.substr(start));
      return parts;
    }
    parts.push_back(text.substr(start, pos - start));
    start = pos + 1;
  }
}

[[noreturn]] void io_failure(const std::string& what, const fs::path& path) {
  throw Error(ErrorKind::IoFailure, what + ": " + path.string(), {{"path", path.string()}});
}

bool path_has_prefix(const fs::path& path, const fs::path& prefix) {
  auto p = path.begin();
  for (auto q = prefix.begin(); q != prefix.end(); ++q, ++p) {
    if (q->empty() && std::next(q) == prefix.end()) return true;  // trailing separator
    if (p == path.end() || *p != *q) return false;
  }
  return true;
}

}  // namespace

// ---------------------------------------------------------------------------
// Names and references

std::string_view to_string(Subfolder subfolder) noexcept {
  switch (subfolder) {
    case Subfolder::Compositions: return "compositions";
    case Subfolder::Materials: return "materials";
    case Subfolder::BuildConfigs: return "build_configs";
    case Subfolder::ProcessMaps: return "process_maps";
    case Subfolder::PropertyDiagrams: return "property_diagrams";
    case Subfolder::PhaseTransitionTemperatures: return "phase_transition_temperatures";
  }
  return "";
}

Subfolder parse_subfolder(std::string_view name) {
  for (Subfolder s : kAllSubfolders) {
    if (to_string(s) == name) return s;
  }
  throw Error(ErrorKind::UnknownSubfolder, "unknown subfolder '" + std::string(name) + "'",
              {{"subfolder", name}});
}

bool is_valid_workspace_name(std::string_view name) noexcept {
  return !name.empty() && name.size() <= 128 && std::all_of(name.begin(), name.end(), is_name_char);
}

bool is_valid_document_filename(std::string_view filename) noexcept {
  if (filename.empty() || filename.size() > 256) return false;
  const auto parts = split(filename, '/');
  if (parts.size() > 2) return false;
  if (!std::all_of(parts.begin(), parts.end(), is_valid_component)) return false;
  return ends_with_json(parts.back());
}

std::string DocumentRef::uri() const {
  return std::string(kScheme) + workspace + "/" + std::string(to_string(subfolder)) + "/" +
         filename;
}

std::string DocumentRef::stem() const {
  std::string_view name = filename;
  if (auto slash = name.rfind('/'); slash != std::string_view::npos) name = name.substr(slash + 1);
  if (ends_with_json(name)) name.remove_suffix(5);
  return std::string(name);
}

void DocumentRef::validate() const {
  if (!is_valid_workspace_name(workspace)) {
    throw Error(ErrorKind::InvalidName, "invalid workspace name '" + workspace + "'",
                {{"workspace", workspace}});
  }
  if (!is_valid_document_filename(filename)) {
    throw Error(ErrorKind::InvalidName, "invalid document filename '" + filename + "'",
                {{"filename", filename}});
  }
  if (filename.find('/') != std::string::npos && subfolder != Subfolder::ProcessMaps) {
    throw Error(ErrorKind::InvalidName, "nested filenames are only allowed under process_maps",
                {{"filename", filename}});
  }
}

DocumentRef DocumentRef::from_uri(std::string_view uri) {
  ResourceUri parsed = parse_resource_uri(uri);
  if (!parsed.filename) {
    throw Error(ErrorKind::MalformedUri, "URI names a folder, not a document",
                {{"uri", std::string(uri)}});
  }
  return DocumentRef{parsed.workspace, parsed.subfolder, *parsed.filename};
}

json document_ref_to_json(const DocumentRef& ref) {
  return {{"workspace", ref.workspace},
          {"subfolder", to_string(ref.subfolder)},
          {"filename", ref.filename},
          {"uri", ref.uri()}};
}

ResourceUri parse_resource_uri(std::string_view uri) {
  auto malformed = [&](const std::string& why) {
    return Error(ErrorKind::MalformedUri, "malformed resource URI (" + why + ")",
                 {{"uri", std::string(uri)}});
  };
  std::string_view rest = uri;
  if (!rest.empty() && rest.front() == '@') rest.remove_prefix(1);
  if (rest.substr(0, kScheme.size()) != kScheme) throw malformed("expected workspace:// scheme");
  rest.remove_prefix(kScheme.size());

  auto parts = split(rest, '/');
  if (parts.size() < 2) throw malformed("expected workspace and subfolder");
  ResourceUri out;
  if (!is_valid_workspace_name(parts[0])) throw malformed("invalid workspace name");
  out.workspace = std::string(parts[0]);
  try {
    out.subfolder = parse_subfolder(parts[1]);
  } catch (const Error&) {
    throw malformed("unknown subfolder");
  }

  std::string filename;
  for (std::size_t i = 2; i < parts.size(); ++i) {
    if (parts[i].empty() && i + 1 == parts.size()) break;  // trailing slash
    if (parts[i].empty()) throw malformed("empty path segment");
    if (i > 2) filename += '/';
    filename += parts[i];
  }
  if (!filename.empty()) {
    DocumentRef ref{out.workspace, out.subfolder, filename};
    try {
      ref.validate();
    } catch (const Error&) {
      throw malformed("invalid filename");
    }
    out.filename = std::move(filename);
  }
  return out;
}

// ---------------------------------------------------------------------------
// WriterLock

WriterLock::WriterLock(WriterLock&& other) noexcept
    : fd_(std::exchange(other.fd_, -1)), workspace_(std::move(other.workspace_)) {}

WriterLock& WriterLock::operator=(WriterLock&& other) noexcept {
  if (this != &other) {
    if (fd_ >= 0) ::close(fd_);
    fd_ = std::exchange(other.fd_, -1);
    workspace_ = std::move(other.workspace_);
  }
  return *this;
}

WriterLock::~WriterLock() {
  if (fd_ >= 0) ::close(fd_);  // closing the descriptor releases the flock
}

// ---------------------------------------------------------------------------
// WorkspaceStore

WorkspaceStore::WorkspaceStore(fs::path root, StoreOptions options)
    : root_(fs::absolute(std::move(root)).lexically_normal()), options_(std::move(options)) {}

WorkspaceStore WorkspaceStore::from_environment() {
  const char* env = std::getenv(kRootEnvVar);
  return WorkspaceStore(env != nullptr && *env != '\0' ? fs::path(env) : fs::path("workspaces"));
}

fs::path WorkspaceStore::workspace_path(std::string_view name) const {
  if (!is_valid_workspace_name(name)) {
    throw Error(ErrorKind::InvalidName, "invalid workspace name '" + std::string(name) + "'",
                {{"workspace", std::string(name)}});
  }
  return root_ / std::string(name);
}

void WorkspaceStore::check_inside_root(const fs::path& path) const {
  std::error_code ec;
  const fs::path canonical_root = fs::weakly_canonical(root_, ec);
  const fs::path canonical_path = fs::weakly_canonical(path, ec);
  if (ec || !path_has_prefix(canonical_path, canonical_root) || canonical_path == canonical_root) {
    throw Error(ErrorKind::InvalidName, "path escapes the workspace root",
                {{"path", path.string()}});
  }
}

void WorkspaceStore::require_workspace(std::string_view name) const {
  const fs::path dir = workspace_path(name);
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) {
    throw Error(ErrorKind::WorkspaceNotFound, "workspace '" + std::string(name) + "' not found",
                {{"workspace", std::string(name)}});
  }
  check_inside_root(dir);
}

Workspace WorkspaceStore::init_workspace(std::string_view name) {
  const fs::path dir = workspace_path(name);
  std::error_code ec;
  for (Subfolder s : kAllSubfolders) {
    fs::create_directories(dir / std::string(to_string(s)), ec);
    if (ec) io_failure("cannot create workspace folder", dir / std::string(to_string(s)));
  }
  check_inside_root(dir);
  return open_workspace(name);
}

Workspace WorkspaceStore::open_workspace(std::string_view name) const {
  require_workspace(name);
  Workspace ws{std::string(name), workspace_path(name), {}};
  for (Subfolder s : kAllSubfolders) ws.subfolders.emplace_back(to_string(s));
  return ws;
}

bool WorkspaceStore::has_workspace(std::string_view name) const {
  std::error_code ec;
  return is_valid_workspace_name(name) && fs::is_directory(root_ / std::string(name), ec);
}

std::vector<std::string> WorkspaceStore::list_workspaces() const {
  std::vector<std::string> names;
  std::error_code ec;
  if (!fs::exists(root_, ec)) return names;
  fs::directory_iterator it(root_, ec);
  if (ec) io_failure("cannot list workspace root", root_);
  for (const auto& entry : it) {
    const std::string name = entry.path().filename().string();
    if (entry.is_directory(ec) && is_valid_workspace_name(name)) names.push_back(name);
  }
  std::sort(names.begin(), names.end());
  return names;
}

std::vector<std::string> WorkspaceStore::list_contents(std::string_view workspace,
                                                       std::string_view subfolder) const {
  return list_contents(workspace, parse_subfolder(subfolder));
}

std::vector<std::string> WorkspaceStore::list_contents(std::string_view workspace,
                                                       Subfolder subfolder) const {
  require_workspace(workspace);
  const fs::path dir = workspace_path(workspace) / std::string(to_string(subfolder));
  std::vector<std::string> files;
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) return files;

  auto collect = [&](const fs::path& folder, const std::string& prefix) {
    for (const auto& entry : fs::directory_iterator(folder, ec)) {
      const std::string name = entry.path().filename().string();
      if (entry.is_regular_file(ec) && is_valid_component(name) && ends_with_json(name)) {
        files.push_back(prefix + name);
      }
    }
  };
  collect(dir, "");
  if (subfolder == Subfolder::ProcessMaps) {
    for (const auto& entry : fs::directory_iterator(dir, ec)) {
      const std::string name = entry.path().filename().string();
      if (entry.is_directory(ec) && is_valid_component(name)) collect(entry.path(), name + "/");
    }
  }
  std::sort(files.begin(), files.end());
  return files;
}

WriterLock WorkspaceStore::lock_for_writing(std::string_view workspace) const {
  require_workspace(workspace);
  const fs::path lock_path = workspace_path(workspace) / kLockFile;
  int fd = ::open(lock_path.c_str(), O_RDWR | O_CREAT | O_CLOEXEC, 0644);
  if (fd < 0) io_failure("cannot open lock file", lock_path);
  if (::flock(fd, LOCK_EX | LOCK_NB) != 0) {
    const int err = errno;
    ::close(fd);
    if (err == EWOULDBLOCK) {
      throw Error(ErrorKind::Busy,
                  "workspace '" + std::string(workspace) + "' is locked by another writer; retry",
                  {{"workspace", std::string(workspace)}, {"retryable", true}});
    }
    io_failure("cannot lock workspace", lock_path);
  }
  return WriterLock(fd, std::string(workspace));
}

fs::path WorkspaceStore::resolve(const DocumentRef& ref) const {
  ref.validate();
  fs::path path = workspace_path(ref.workspace) / std::string(to_string(ref.subfolder));
  for (auto part : split(ref.filename, '/')) path /= std::string(part);
  check_inside_root(path);
  return path;
}

void WorkspaceStore::check_schema(const DocumentRef& ref, const json& payload) const {
  const std::string found =
      payload.is_object() && payload.contains("schema") && payload.at("schema").is_string()
          ? payload.at("schema").get<std::string>()
          : std::string{};
  std::vector<std::string> expected;
  for (const auto& schema : document_schemas()) {
    if (schema.subfolder != ref.subfolder) continue;
    expected.push_back(schema.name);
    if (schema.name != found) continue;
    const json version = payload.value("schema_version", json());
    if (version != schema.version) {
      throw Error(ErrorKind::SchemaMismatch,
                  "unsupported schema_version for '" + found + "'",
                  {{"expected", schema.name + " v" + std::to_string(schema.version)},
                   {"found", found + " v" + version.dump()}});
    }
    if (schema.validate) schema.validate(payload);
    return;
  }
  std::string expected_text;
  for (const auto& name : expected) expected_text += (expected_text.empty() ? "" : "|") + name;
  throw Error(ErrorKind::SchemaMismatch,
              "document schema '" + found + "' does not belong in " +
                  std::string(to_string(ref.subfolder)) + " (expected " + expected_text + ")",
              {{"expected", expected_text}, {"found", found}});
}

DocumentRef WorkspaceStore::save_document(const DocumentRef& ref, json payload) {
  const WriterLock lock = lock_for_writing(ref.workspace);
  return save_document(ref, std::move(payload), lock);
}

DocumentRef WorkspaceStore::save_document(const DocumentRef& ref, json payload,
                                          const WriterLock& lock) {
  require_workspace(ref.workspace);
  if (lock.workspace() != ref.workspace || lock.fd_ < 0) {
    throw Error(ErrorKind::Busy, "writer lock held for a different workspace");
  }
  if (!payload.is_object()) {
    throw Error(ErrorKind::InvalidDocument, "documents must be JSON objects");
  }
  if (!payload.contains("schema_version")) payload["schema_version"] = 1;
  check_schema(ref, payload);

  const fs::path target = resolve(ref);
  std::error_code ec;
  fs::create_directories(target.parent_path(), ec);
  if (ec) io_failure("cannot create folder", target.parent_path());

  const fs::path temp =
      target.parent_path() / ("." + target.filename().string() + ".tmp" + std::to_string(::getpid()));
  try {
    {
      std::ofstream out(temp, std::ios::binary | std::ios::trunc);
      if (!out) io_failure("cannot write", temp);
      out << payload.dump(2) << '\n';
      out.flush();
      if (!out) io_failure("short write", temp);
    }
    if (options_.before_commit) options_.before_commit(temp, target);
    fs::rename(temp, target, ec);
    if (ec) io_failure("cannot replace", target);
  } catch (...) {
    fs::remove(temp, ec);
    throw;
  }
  return ref;
}

json WorkspaceStore::load_document(const DocumentRef& ref) const {
  require_workspace(ref.workspace);
  const fs::path path = resolve(ref);
  std::error_code ec;
  if (!fs::is_regular_file(path, ec)) {
    throw Error(ErrorKind::DocumentNotFound, "document not found: " + ref.uri(),
                {{"uri", ref.uri()}});
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) io_failure("cannot read", path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  json document = json::parse(buffer.str(), nullptr, false);
  if (document.is_discarded()) {
    throw Error(ErrorKind::InvalidDocument, "document is not valid JSON: " + ref.uri(),
                {{"uri", ref.uri()}});
  }
  check_schema(ref, document);
  return document;
}

bool WorkspaceStore::document_exists(const DocumentRef& ref) const {
  if (!has_workspace(ref.workspace)) return false;
  std::error_code ec;
  return fs::is_regular_file(resolve(ref), ec);
}

void WorkspaceStore::remove_document(const DocumentRef& ref, const WriterLock& lock) {
  if (lock.workspace() != ref.workspace) {
    throw Error(ErrorKind::Busy, "writer lock held for a different workspace");
  }
  std::error_code ec;
  fs::remove(resolve(ref), ec);
  if (ec) io_failure("cannot remove", resolve(ref));
}

}  // namespace printmap
