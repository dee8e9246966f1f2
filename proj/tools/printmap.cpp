// printmap command-line interface. Units at this boundary are W, mm/s and um;
// everything stored is SI.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "printmap/alloy_database.hpp"
#include "printmap/documents.hpp"
#include "printmap/mcp_server.hpp"
#include "printmap/process_map.hpp"
#include "printmap/rosenthal.hpp"
#include "printmap/tools.hpp"

namespace {

using printmap::json;

constexpr double kUm = 1e-6;
constexpr double kMmPerS = 1e-3;

// Operation failure already reported in the tool's own words.
struct Failure {
  std::string kind;
  std::string message;
};

void report(const Failure& f) {
  std::cerr << json{{"error_kind", f.kind}, {"message", f.message}}.dump() << '\n';
}

json call(const printmap::ToolCatalog& tools, const char* name, const json& args) {
  const printmap::ToolEnvelope envelope = tools.call(name, args);
  if (!envelope.ok) throw Failure{envelope.error_kind, envelope.message};
  return envelope.value;
}

std::string fixed(double v, int digits = 2) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

void print_json(const json& j) { std::cout << j.dump(2) << '\n'; }

// "Fe=0.9,C=0.1" -> {"Fe":0.9,"C":0.1}
json parse_elements(const std::string& text) {
  json out = json::object();
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t end = std::min(text.find(',', start), text.size());
    const std::string item = text.substr(start, end - start);
    const std::size_t eq = item.find('=');
    if (eq == std::string::npos) throw CLI::ValidationError("--elements", "expected SYMBOL=AMOUNT pairs");
    try {
      out[item.substr(0, eq)] = std::stod(item.substr(eq + 1));
    } catch (const std::exception&) {
      throw CLI::ValidationError("--elements", "bad amount in '" + item + "'");
    }
    start = end + 1;
  }
  return out;
}

json with_workspace(json args, const std::string& workspace) {
  if (!workspace.empty()) args["workspace"] = workspace;
  return args;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Laser powder bed fusion printability toolkit"};
  app.require_subcommand(1);
  std::string root;
  bool as_json = false;
  app.add_option("--root", root, "Workspace root (default $PRINTMAP_WORKSPACE_ROOT or ./workspaces)");
  app.add_flag("--json", as_json, "Print JSON documents instead of text");

  // workspace ---------------------------------------------------------------
  auto* ws_cmd = app.add_subcommand("workspace", "Manage workspaces")->require_subcommand(1);
  std::string ws_name, ws_subfolder;
  auto* ws_init = ws_cmd->add_subcommand("init", "Create a workspace");
  ws_init->add_option("name", ws_name, "Workspace name")->required();
  auto* ws_list = ws_cmd->add_subcommand("list", "List workspaces");
  auto* ws_contents = ws_cmd->add_subcommand("contents", "List documents in a subfolder");
  ws_contents->add_option("workspace", ws_name, "Workspace name")->required();
  ws_contents->add_option("subfolder", ws_subfolder, "Subfolder name")->required();

  // alloy -------------------------------------------------------------------
  auto* alloy_cmd = app.add_subcommand("alloy", "Known alloys")->require_subcommand(1);
  std::string alloy_name;
  auto* alloy_list = alloy_cmd->add_subcommand("list", "List known alloys");
  auto* alloy_show = alloy_cmd->add_subcommand("show", "Show one alloy");
  alloy_show->add_option("name", alloy_name, "Alloy name or alias")->required();

  // composition -------------------------------------------------------------
  auto* comp_cmd = app.add_subcommand("composition", "Composition documents")->require_subcommand(1);
  std::string workspace, doc_name, elements_text, provider = "alloy-table";
  auto* comp_create = comp_cmd->add_subcommand("create", "Save a composition document");
  comp_create->add_option("--workspace,-w", workspace, "Workspace name")->required();
  comp_create->add_option("--name", doc_name, "Document name")->required();
  auto* comp_alloy = comp_create->add_option("--alloy", alloy_name, "Known alloy");
  auto* comp_elements = comp_create->add_option("--elements", elements_text, "Amounts, e.g. Fe=0.9,C=0.1");
  comp_alloy->excludes(comp_elements);

  // material ----------------------------------------------------------------
  auto* mat_cmd = app.add_subcommand("material", "Material documents")->require_subcommand(1);
  std::string composition_ref;
  auto* mat_compile = mat_cmd->add_subcommand("compile", "Compile a material from a composition");
  mat_compile->add_option("--workspace,-w", workspace, "Workspace name")->required();
  auto* mat_comp = mat_compile->add_option("--composition", composition_ref, "Composition reference");
  auto* mat_alloy = mat_compile->add_option("--alloy", alloy_name, "Create the composition from a known alloy");
  auto* mat_elements = mat_compile->add_option("--elements", elements_text, "Create the composition from amounts");
  mat_compile->add_option("--name", doc_name, "Name for a composition created by --alloy/--elements");
  mat_compile->add_option("--provider", provider, "alloy-table or mixture-rule")
      ->check(CLI::IsMember({"alloy-table", "mixture-rule"}));
  mat_comp->excludes(mat_alloy)->excludes(mat_elements);
  mat_alloy->excludes(mat_elements);

  // build -------------------------------------------------------------------
  auto* build_cmd = app.add_subcommand("build", "Build configurations")->require_subcommand(1);
  double power = 0, velocity = 0, layer_um = 30, hatch_um = 50, plate = 298.15;
  auto* build_create = build_cmd->add_subcommand("create", "Save a build configuration");
  build_create->add_option("--workspace,-w", workspace, "Workspace name")->required();
  build_create->add_option("--name", doc_name, "Document name")->required();
  build_create->add_option("--power", power, "Beam power, W")->required();
  build_create->add_option("--velocity", velocity, "Scan velocity, mm/s")->required();
  build_create->add_option("--layer", layer_um, "Layer height, um")->capture_default_str();
  build_create->add_option("--hatch", hatch_um, "Hatch spacing, um")->capture_default_str();
  build_create->add_option("--plate", plate, "Plate temperature, K")->capture_default_str();

  // meltpool ----------------------------------------------------------------
  auto* mp_cmd = app.add_subcommand("meltpool", "Melt pool model")->require_subcommand(1);
  std::string material_ref;
  auto* mp_dims = mp_cmd->add_subcommand("dims", "Rosenthal melt pool dimensions");
  mp_dims->add_option("--power", power, "Beam power, W")->required();
  mp_dims->add_option("--velocity", velocity, "Scan velocity, mm/s")->required();
  mp_dims->add_option("--material", material_ref, "Material file path, workspace:// URI, or name with --workspace")
      ->required();
  mp_dims->add_option("--workspace,-w", workspace, "Workspace for a bare material name");
  mp_dims->add_option("--plate", plate, "Plate temperature, K")->capture_default_str();
  auto* mp_hatch = mp_dims->add_option("--hatch", hatch_um, "Hatch spacing, um (with --layer: evaluate lack of fusion)");
  auto* mp_layer = mp_dims->add_option("--layer", layer_um, "Layer height, um");
  mp_hatch->needs(mp_layer);
  mp_layer->needs(mp_hatch);

  // processmap --------------------------------------------------------------
  auto* pm_cmd = app.add_subcommand("processmap", "Lack-of-fusion process maps")->require_subcommand(1);
  std::string build_ref, config_ref, result_ref, run_name, output;
  std::vector<double> powers, velocities;
  auto* pm_init = pm_cmd->add_subcommand("init", "Create a process-map run");
  pm_init->add_option("--workspace,-w", workspace, "Workspace name")->required();
  pm_init->add_option("--build", build_ref, "Build configuration reference")->required();
  pm_init->add_option("--material", material_ref, "Material reference")->required();
  pm_init->add_option("--powers", powers, "Beam powers, W (comma separated)")->delimiter(',');
  pm_init->add_option("--velocities", velocities, "Scan velocities, mm/s (comma separated)")->delimiter(',');
  pm_init->add_option("--run", run_name, "Run folder name");
  auto* pm_generate = pm_cmd->add_subcommand("generate", "Evaluate a process-map run");
  pm_generate->add_option("--config", config_ref, "Process-map config reference")->required();
  pm_generate->add_option("--workspace,-w", workspace, "Workspace for a bare reference");
  auto* pm_render = pm_cmd->add_subcommand("render", "Draw a process-map result as SVG");
  pm_render->add_option("--result", result_ref, "Process-map result reference")->required();
  pm_render->add_option("--workspace,-w", workspace, "Workspace for a bare reference");
  pm_render->add_option("--output,-o", output, "SVG path (default: next to the result)");

  auto* serve = app.add_subcommand("serve", "Run the MCP server on stdin/stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    printmap::WorkspaceStore store =
        root.empty() ? printmap::WorkspaceStore::from_environment() : printmap::WorkspaceStore(root);
    printmap::ToolCatalog tools(store);

    if (*serve) {
      printmap::McpServer server(tools);
      server.serve(std::cin, std::cout);
      return 0;
    }

    if (*ws_init) {
      const json v = call(tools, "workspace_init", {{"name", ws_name}});
      if (as_json) print_json(v);
      else std::cout << "workspace " << ws_name << " ready at " << store.workspace_path(ws_name).string() << '\n';
    } else if (*ws_list) {
      const json v = call(tools, "workspace_list", json::object());
      if (as_json) print_json(v);
      else for (const auto& n : v.at("workspaces")) std::cout << n.get<std::string>() << '\n';
    } else if (*ws_contents) {
      const json v = call(tools, "workspace_contents", {{"workspace", ws_name}, {"subfolder", ws_subfolder}});
      if (as_json) print_json(v);
      else for (const auto& n : v.at("files")) std::cout << n.get<std::string>() << '\n';
    } else if (*alloy_list) {
      const json v = call(tools, "alloy_list", json::object());
      if (as_json) print_json(v);
      else for (const auto& n : v.at("alloys")) std::cout << n.get<std::string>() << '\n';
    } else if (*alloy_show) {
      const json v = call(tools, "alloy_show", {{"name", alloy_name}});
      if (as_json) {
        print_json(v);
      } else {
        std::cout << v.at("name").get<std::string>() << '\n';
        for (const auto& [symbol, fraction] : v.at("composition").items()) {
          std::cout << "  " << symbol << "  " << fixed(fraction.get<double>(), 4) << '\n';
        }
      }
    } else if (*comp_create) {
      json args = {{"workspace", workspace}, {"name", doc_name}};
      if (*comp_alloy) args["alloy"] = alloy_name;
      else if (*comp_elements) args["elements"] = parse_elements(elements_text);
      const json v = call(tools, "composition_create", args);
      if (as_json) print_json(v.at("composition"));
      else std::cout << v.at("composition_ref").at("uri").get<std::string>() << '\n';
    } else if (*mat_compile) {
      if (!*mat_comp) {
        if (!*mat_alloy && !*mat_elements) {
          throw CLI::ValidationError("material compile", "give --composition, --alloy or --elements");
        }
        std::string name = doc_name;
        if (name.empty()) {
          if (!*mat_alloy) throw CLI::ValidationError("--name", "required with --elements");
          name = printmap::fold_alloy_name(alloy_name);
        }
        json args = {{"workspace", workspace}, {"name", name}};
        if (*mat_alloy) args["alloy"] = alloy_name;
        else args["elements"] = parse_elements(elements_text);
        composition_ref = call(tools, "composition_create", args).at("composition_ref").at("uri");
      }
      const json v = call(tools, "material_compile",
                          {{"workspace", workspace},
                           {"composition_ref", composition_ref},
                           {"provider", {{"provider_kind", provider}}}});
      if (as_json) {
        print_json(v.at("material"));
      } else {
        const json& m = v.at("material");
        std::cout << v.at("material_ref").at("uri").get<std::string>() << '\n'
                  << "  name                    " << m.at("name").get<std::string>() << '\n'
                  << "  thermal conductivity    " << fixed(m.at("thermal_conductivity"), 3) << " W/(m K)\n"
                  << "  density                 " << fixed(m.at("density"), 1) << " kg/m^3\n"
                  << "  specific heat           " << fixed(m.at("specific_heat"), 1) << " J/(kg K)\n"
                  << "  electrical resistivity  " << m.at("electrical_resistivity").dump() << " Ohm m\n"
                  << "  absorptivity            " << fixed(m.at("absorptivity"), 4) << '\n'
                  << "  solidus / liquidus      " << fixed(m.at("transitions").at("t_solidus"), 1) << " / "
                  << fixed(m.at("transitions").at("t_liquidus"), 1) << " K\n";
      }
    } else if (*build_create) {
      const json v = call(tools, "build_config_create",
                          {{"workspace", workspace},
                           {"name", doc_name},
                           {"beam_power_w", power},
                           {"scan_velocity_m_s", velocity * kMmPerS},
                           {"layer_height_m", layer_um * kUm},
                           {"hatch_spacing_m", hatch_um * kUm},
                           {"plate_temperature_k", plate}});
      if (as_json) print_json(v.at("build_config"));
      else std::cout << v.at("build_config_ref").at("uri").get<std::string>() << '\n';
    } else if (*mp_dims) {
      json args = {{"beam_power_w", power}, {"scan_velocity_m_s", velocity * kMmPerS}, {"plate_temperature_k", plate}};
      if (*mp_hatch) {
        args["hatch_spacing_m"] = hatch_um * kUm;
        args["layer_height_m"] = layer_um * kUm;
      }
      json v;
      const bool is_uri = material_ref.starts_with("workspace://") || material_ref.starts_with("@workspace://");
      if (is_uri || !workspace.empty()) {
        args["material_ref"] = material_ref;
        v = call(tools, "meltpool_dimensions", with_workspace(args, workspace));
      } else {
        // A plain path: load the material straight from disk.
        std::ifstream in(material_ref);
        if (!in) throw Failure{"DocumentNotFound", "no material file at " + material_ref};
        json doc;
        try {
          doc = json::parse(in);
        } catch (const json::parse_error& e) {
          throw Failure{"InvalidDocument", e.what()};
        }
        const printmap::Material m = printmap::material_from_json(doc);
        const auto p = printmap::rosenthal_params_for(m, power, velocity * kMmPerS, plate);
        const auto d = printmap::meltpool_dimensions(p);
        v = {{"material_name", m.name},
             {"absorbed_power_w", p.absorbed_power},
             {"melt_width_um", d.width / kUm},
             {"melt_depth_um", d.depth / kUm},
             {"melt_length_um", d.length / kUm},
             {"trailing_length_um", d.trailing_length / kUm}};
        if (*mp_hatch) {
          const auto lof = printmap::lof_criterion(hatch_um * kUm, d.width, layer_um * kUm, d.depth);
          v["lof_metric"] = lof.metric;
          v["lack_of_fusion"] = lof.lack_of_fusion;
        }
      }
      if (as_json) {
        print_json(v);
      } else {
        std::cout << v.at("material_name").get<std::string>() << " at " << fixed(power, 1) << " W, "
                  << fixed(velocity, 1) << " mm/s\n"
                  << "  width   " << fixed(v.at("melt_width_um")) << " um\n"
                  << "  depth   " << fixed(v.at("melt_depth_um")) << " um\n"
                  << "  length  " << fixed(v.at("melt_length_um")) << " um\n";
        if (v.contains("lof_metric")) {
          std::cout << "  lack-of-fusion metric " << fixed(v.at("lof_metric"), 3)
                    << (v.at("lack_of_fusion").get<bool>() ? " (lack of fusion)" : " (printable)") << '\n';
        }
      }
    } else if (*pm_init) {
      json args = {{"workspace", workspace}, {"build_ref", build_ref}, {"material_ref", material_ref}};
      if (!powers.empty()) args["power_range_w"] = powers;
      if (!velocities.empty()) {
        std::vector<double> si;
        for (double v : velocities) si.push_back(v * kMmPerS);
        args["velocity_range_m_s"] = si;
      }
      if (!run_name.empty()) args["run_name"] = run_name;
      const json v = call(tools, "process_map_init", args);
      if (as_json) print_json(store.load_document(printmap::DocumentRef::from_uri(v.at("config_ref").at("uri").get<std::string>())));
      else std::cout << v.at("config_ref").at("uri").get<std::string>() << '\n';
    } else if (*pm_generate) {
      const json v = call(tools, "process_map_generate", with_workspace({{"config_ref", config_ref}}, workspace));
      const auto ref = printmap::DocumentRef::from_uri(v.at("result_ref").at("uri").get<std::string>());
      if (as_json) {
        print_json(store.load_document(ref));
      } else {
        std::cout << ref.uri() << '\n';
        for (const auto& variant : v.at("summary")) {
          std::cout << "  layer " << fixed(variant.at("layer_height_um"), 1) << " um: "
                    << variant.at("lack_of_fusion").size() << " lack of fusion, "
                    << variant.at("printable").size() << " printable\n";
        }
      }
    } else if (*pm_render) {
      const auto ref = printmap::resolve_document_ref(
          result_ref, workspace.empty() ? std::nullopt : std::optional<std::string>(workspace),
          printmap::Subfolder::ProcessMaps);
      const auto path = printmap::render_process_map(store, ref, output);
      if (as_json) print_json({{"result_ref", printmap::document_ref_to_json(ref)}, {"figure", path.string()}});
      else std::cout << path.string() << '\n';
    }
    return 0;
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  } catch (const Failure& f) {
    report(f);
    return 1;
  } catch (const printmap::Error& e) {
    report({std::string(e.kind_name()), e.what()});
    return 1;
  } catch (const std::exception& e) {
    report({"IoFailure", e.what()});
    return 1;
  }
}
