#include <doctest.h>

#include <array>
#include <cstdio>
#include <fstream>
#include <sys/wait.h>

#include "printmap/process_map.hpp"
#include "printmap/tools.hpp"
#include "test_support.hpp"

using namespace printmap;
namespace fs = std::filesystem;

namespace {

struct Run {
  int exit_code = -1;
  std::string out;
  std::string err;
};

std::string quote(const std::string& s) {
  std::string q = "'";
  for (char c : s) q += c == '\'' ? std::string("'\\''") : std::string(1, c);
  return q + "'";
}

Run cli(const fs::path& root, const std::string& args) {
  const fs::path err_file = root / ".stderr";
  const std::string command =
      quote(PRINTMAP_CLI) + " --root " + quote(root.string()) + " " + args + " 2>" + quote(err_file.string());
  Run run;
  FILE* pipe = ::popen(command.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::array<char, 4096> buffer{};
  std::size_t n = 0;
  while ((n = std::fread(buffer.data(), 1, buffer.size(), pipe)) > 0) run.out.append(buffer.data(), n);
  const int status = ::pclose(pipe);
  run.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  std::ifstream in(err_file);
  run.err.assign(std::istreambuf_iterator<char>(in), {});
  fs::remove(err_file);
  return run;
}

json tool_value(const ToolCatalog& tools, const char* name, const json& args) {
  const ToolEnvelope e = tools.call(name, args);
  CAPTURE(e.message);
  REQUIRE(e.error_kind == "");
  return e.value;
}

}  // namespace

TEST_CASE("exit codes") {
  test::TempDir dir;
  CHECK(cli(dir.path(), "workspace init demo").exit_code == 0);
  CHECK(cli(dir.path(), "--no-such-flag").exit_code == 2);
  CHECK(cli(dir.path(), "").exit_code == 2);
  CHECK(cli(dir.path(), "meltpool dims --power abc --velocity 800 --material x.json").exit_code == 2);
  CHECK(cli(dir.path(), "alloy show Unobtainium").exit_code == 1);
  CHECK(cli(dir.path(), "--help").exit_code == 0);
}

TEST_CASE("alloy list prints the bundled alloys") {
  test::TempDir dir;
  const Run run = cli(dir.path(), "alloy list");
  CHECK(run.exit_code == 0);
  int lines = 0;
  for (char c : run.out) lines += c == '\n';
  CHECK(lines >= 12);
  CHECK(run.out.find("Stainless Steel 316L\n") != std::string::npos);
  CHECK(run.out.find("Inconel 718\n") != std::string::npos);
}

TEST_CASE("meltpool dims reports the frozen melt pool of SS316L") {
  test::TempDir dir;
  REQUIRE(cli(dir.path(), "workspace init demo").exit_code == 0);
  REQUIRE(cli(dir.path(), "material compile -w demo --alloy SS316L").exit_code == 0);
  const Run text = cli(dir.path(), "meltpool dims --power 200 --velocity 800 --material ss316l.json -w demo");
  CHECK(text.exit_code == 0);
  CHECK(text.out.find("width   102.95 um") != std::string::npos);
  CHECK(text.out.find("depth   51.48 um") != std::string::npos);
  CHECK(text.out.find("length  383.92 um") != std::string::npos);

  // A material file given by path, outside any workspace.
  const fs::path file = dir.path() / "demo" / "materials" / "ss316l.json";
  const Run by_path = cli(dir.path(), "--json meltpool dims --power 200 --velocity 800 --material " + quote(file.string()));
  REQUIRE(by_path.exit_code == 0);
  const json dims = json::parse(by_path.out);
  CHECK(dims.at("melt_width_um").get<double>() == doctest::Approx(102.954).epsilon(1e-4));
  CHECK(dims.at("melt_depth_um").get<double>() == doctest::Approx(51.477).epsilon(1e-4));
  CHECK(dims.at("melt_length_um").get<double>() == doctest::Approx(383.918).epsilon(1e-4));

  const Run lof = cli(dir.path(), "--json meltpool dims --power 200 --velocity 800 --material ss316l -w demo "
                                  "--hatch 50 --layer 30");
  REQUIRE(lof.exit_code == 0);
  CHECK(json::parse(lof.out).at("lof_metric").get<double>() == doctest::Approx(0.5755).epsilon(1e-3));
  CHECK(json::parse(lof.out).at("lack_of_fusion") == false);
}

TEST_CASE("operation failures exit 1 with a named error") {
  test::TempDir dir;
  REQUIRE(cli(dir.path(), "workspace init demo").exit_code == 0);
  const Run run = cli(dir.path(), "processmap generate --config missing.json -w demo");
  CHECK(run.exit_code == 1);
  CHECK(run.out.empty());
  const json err = json::parse(run.err);
  CHECK(err.at("error_kind") == "DocumentNotFound");
  CHECK_FALSE(err.at("message").get<std::string>().empty());

  const Run no_ws = cli(dir.path(), "workspace contents ghost materials");
  CHECK(no_ws.exit_code == 1);
  CHECK(json::parse(no_ws.err).at("error_kind") == "WorkspaceNotFound");
}

TEST_CASE("full pipeline from the command line") {
  test::TempDir dir;
  REQUIRE(cli(dir.path(), "workspace init demo").exit_code == 0);
  REQUIRE(cli(dir.path(), "material compile -w demo --alloy SS316L").exit_code == 0);
  REQUIRE(cli(dir.path(), "build create -w demo --name b30 --power 200 --velocity 800 --layer 30 --hatch 50").exit_code == 0);
  const Run init = cli(dir.path(), "--json processmap init -w demo --build b30 --material ss316l");
  REQUIRE(init.exit_code == 0);
  CHECK_NOTHROW(process_map_plan_from_json(json::parse(init.out)));
  const std::string config = "workspace://demo/process_maps/ss316l-b30/config.json";
  const Run gen = cli(dir.path(), "processmap generate --config " + config);
  REQUIRE(gen.exit_code == 0);
  const std::string result = "workspace://demo/process_maps/ss316l-b30/result.json";
  CHECK(gen.out.rfind(result + "\n", 0) == 0);
  CHECK(gen.out.find("layer 30.0 um: 4 lack of fusion, 96 printable") != std::string::npos);
  const Run render = cli(dir.path(), "processmap render --result " + result);
  CHECK(render.exit_code == 0);
  CHECK(fs::exists(dir.path() / "demo" / "process_maps" / "ss316l-b30" / "process_map.svg"));
  const fs::path custom = dir.path() / "figure.svg";
  CHECK(cli(dir.path(), "processmap render --result " + result + " -o " + quote(custom.string())).exit_code == 0);
  CHECK(fs::file_size(custom) > 1000);
}

TEST_CASE("CLI and tools/call produce identical documents") {
  test::TempDir cli_dir;
  test::TempDir tool_dir;
  WorkspaceStore store(tool_dir.path());
  ToolCatalog tools(store);

  // 1. workspace init
  REQUIRE(cli(cli_dir.path(), "workspace init demo").exit_code == 0);
  tool_value(tools, "workspace_init", {{"name", "demo"}});
  CHECK(json::parse(cli(cli_dir.path(), "--json workspace contents demo materials").out) ==
        tool_value(tools, "workspace_contents", {{"workspace", "demo"}, {"subfolder", "materials"}}));

  // 2. material compile
  const Run compiled = cli(cli_dir.path(), "--json material compile -w demo --alloy IN718");
  REQUIRE(compiled.exit_code == 0);
  tool_value(tools, "composition_create", {{"workspace", "demo"}, {"name", "in718"}, {"alloy", "IN718"}});
  const json via_tool = tool_value(tools, "material_compile", {{"workspace", "demo"}, {"composition_ref", "in718"}});
  CHECK(json::parse(compiled.out) == via_tool.at("material"));
  for (const char* rel : {"compositions/in718.json", "materials/in718.json"}) {
    CAPTURE(rel);
    std::ifstream a(cli_dir.path() / "demo" / rel), b(tool_dir.path() / "demo" / rel);
    const std::string sa{std::istreambuf_iterator<char>(a), {}}, sb{std::istreambuf_iterator<char>(b), {}};
    CHECK_FALSE(sa.empty());
    CHECK(sa == sb);
  }

  // 3. meltpool dims (mm/s at the CLI boundary, m/s in the tool)
  const Run dims = cli(cli_dir.path(), "--json meltpool dims --power 150 --velocity 600 --material in718 -w demo");
  REQUIRE(dims.exit_code == 0);
  CHECK(json::parse(dims.out) == tool_value(tools, "meltpool_dimensions", {{"workspace", "demo"},
                                                                           {"material_ref", "in718"},
                                                                           {"beam_power_w", 150},
                                                                           {"scan_velocity_m_s", 0.6}}));

  // alloy list
  CHECK(json::parse(cli(cli_dir.path(), "--json alloy list").out) == tool_value(tools, "alloy_list", json::object()));
}

TEST_CASE("--json output validates against the document schemas") {
  test::TempDir dir;
  REQUIRE(cli(dir.path(), "workspace init demo").exit_code == 0);
  auto schema = [](const std::string& name) {
    for (const auto& s : document_schemas()) {
      if (s.name == name) return s;
    }
    FAIL("no schema " << name);
    return document_schemas().front();
  };
  const Run material = cli(dir.path(), "--json material compile -w demo --alloy Ti64");
  REQUIRE(material.exit_code == 0);
  CHECK_NOTHROW(schema("material").validate(json::parse(material.out)));

  const Run build = cli(dir.path(), "--json build create -w demo --name b --power 150 --velocity 500 --layer 30");
  REQUIRE(build.exit_code == 0);
  CHECK_NOTHROW(schema("build_config").validate(json::parse(build.out)));
  CHECK(json::parse(build.out).at("scan_velocity_m_s") == 0.5);
  CHECK(json::parse(build.out).at("layer_height_m").get<double>() == doctest::Approx(30e-6));

  const Run init = cli(dir.path(), "--json processmap init -w demo --build b --material ti64 --powers 100,200 "
                                   "--velocities 500,1000");
  REQUIRE(init.exit_code == 0);
  CHECK_NOTHROW(schema("process_map_config").validate(json::parse(init.out)));
  const Run gen = cli(dir.path(), "--json processmap generate -w demo --config ti64-b/config.json");
  REQUIRE(gen.exit_code == 0);
  const json result = json::parse(gen.out);
  CHECK_NOTHROW(schema("process_map_result").validate(result));
  CHECK(result.at("velocity_range_mm_s") == json::array({500.0, 1000.0}));
}
