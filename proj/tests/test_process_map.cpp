#include <doctest.h>

#include <fstream>
#include <sstream>

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>

#include "printmap/alloy_database.hpp"
#include "printmap/documents.hpp"
#include "printmap/process_map.hpp"
#include "test_support.hpp"

using namespace printmap;

namespace {

Material bundled_material(const char* alloy) {
  const AlloyRecord& r = lookup_alloy(alloy);
  return build_material(r.name, r.composition, ProviderConfig{});
}

BuildConfig build(double layer_um = 30.0, double hatch_um = 50.0) {
  BuildConfig b;
  b.beam_power = 200.0;
  b.scan_velocity = 0.8;
  b.layer_height = layer_um * 1e-6;
  b.hatch_spacing = hatch_um * 1e-6;
  return b;
}

const ProcessMapCell& cell_at(const LayerVariant& v, double power, double velocity_mm_s) {
  for (const auto& c : v.cells) {
    if (c.power_w == power && c.velocity_mm_s == velocity_mm_s) return c;
  }
  throw std::runtime_error("cell not found");
}

// Lack-of-fusion test written out separately from the library.
bool oracle_lof(double hatch_um, double width_um, double layer_um, double depth_um) {
  const double a = hatch_um / width_um;
  const double b = layer_um / depth_um;
  return a * a + b * b > 1.0;
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

TEST_CASE("lack-of-fusion criterion examples") {
  auto a = lof_criterion(50e-6, 100e-6, 30e-6, 60e-6);
  CHECK(a.metric == doctest::Approx(0.5).epsilon(1e-14));
  CHECK_FALSE(a.lack_of_fusion);

  auto boundary = lof_criterion(50e-6, 50e-6, 0.0, 30e-6);
  CHECK(boundary.metric == 1.0);
  CHECK_FALSE(boundary.lack_of_fusion);

  auto c = lof_criterion(50e-6, 50e-6, 30e-6, 30e-6);
  CHECK(c.metric == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(c.lack_of_fusion);
}

TEST_CASE("lack-of-fusion criterion rejects a zero melt pool") {
  CHECK(test::error_kind([] { lof_criterion(50e-6, 0.0, 30e-6, 30e-6); }) == "ZeroMeltPoolDimension");
  CHECK(test::error_kind([] { lof_criterion(50e-6, 50e-6, 30e-6, 0.0); }) == "ZeroMeltPoolDimension");
  CHECK(test::error_kind([] { lof_criterion(-1.0, 50e-6, 30e-6, 30e-6); }) == "NonPositiveInput");
}

TEST_CASE("default grid is 10 powers by 10 velocities by 3 layer heights") {
  const ProcessMapConfig config = ProcessMapConfig::defaults();
  CHECK(config.power_range.size() == 10);
  CHECK(config.power_range.front() == 100.0);
  CHECK(config.power_range.back() == 1000.0);
  CHECK(config.velocity_range.size() == 10);
  CHECK(config.velocity_range.front() == doctest::Approx(0.1));
  CHECK(config.velocity_range.back() == doctest::Approx(1.0));

  const ProcessMapResult r = compute_process_map(bundled_material("SS316L"), build(), config);
  REQUIRE(r.variants.size() == 3);
  std::size_t cells = 0;
  for (const auto& v : r.variants) cells += v.cells.size();
  CHECK(cells == 300);
  CHECK(r.velocity_range_mm_s.front() == 100.0);
  CHECK(r.velocity_range_mm_s.back() == 1000.0);
  CHECK(r.variants[0].layer_height_um == doctest::Approx(5.0));
  CHECK(r.variants[1].layer_height_um == doctest::Approx(30.0));
  CHECK(r.variants[2].layer_height_um == doctest::Approx(55.0));
}

TEST_CASE("range validation") {
  ProcessMapConfig c = ProcessMapConfig::defaults();
  c.power_range = {};
  CHECK(test::error_kind([&] { c.validate(); }) == "InvalidRange");
  c = ProcessMapConfig::defaults();
  c.velocity_range = {0.5, 0.5};
  CHECK(test::error_kind([&] { c.validate(); }) == "InvalidRange");
  c = ProcessMapConfig::defaults();
  c.power_range = {-100, 200};
  CHECK(test::error_kind([&] { c.validate(); }) == "InvalidRange");
  c = ProcessMapConfig::defaults();
  c.layer_height_offsets = {-10e-6, 0, 10e-6};
  CHECK(test::error_kind([&] { c.validate(); }) == "InvalidRange");
}

TEST_CASE("SS316L combinations reported as dense are printable") {
  ProcessMapConfig config = ProcessMapConfig::defaults();
  config.velocity_range = {0.5, 0.7, 0.9, 1.1};
  config.power_range = {150, 200, 250, 300};
  const ProcessMapResult r = compute_process_map(bundled_material("SS316L"), build(), config);
  const LayerVariant& prescribed = r.variants[1];
  for (auto [p, v] : {std::pair{150.0, 500.0}, {200.0, 700.0}, {250.0, 900.0}, {300.0, 1100.0}}) {
    CAPTURE(p);
    CAPTURE(v);
    CHECK_FALSE(cell_at(prescribed, p, v).lack_of_fusion);
  }
}

TEST_CASE("each cell's class equals an independent re-evaluation") {
  for (const char* alloy : {"SS316L", "IN718", "Ti-6Al-4V"}) {
    const BuildConfig b = build();
    const ProcessMapResult r = compute_process_map(bundled_material(alloy), b, ProcessMapConfig::defaults());
    for (const auto& v : r.variants) {
      for (const auto& c : v.cells) {
        CHECK(c.lack_of_fusion == (c.lof_metric > 1.0));
        CHECK(c.lack_of_fusion == oracle_lof(50.0, c.melt_width_um, v.layer_height_um, c.melt_depth_um));
      }
    }
  }
}

TEST_CASE("summaries partition the grid") {
  const ProcessMapResult r =
      compute_process_map(bundled_material("IN718"), build(), ProcessMapConfig::defaults());
  for (const auto& v : r.variants) {
    CHECK(v.lack_of_fusion.size() + v.printable.size() == v.cells.size());
    std::size_t lof = 0;
    for (const auto& c : v.cells) lof += c.lack_of_fusion ? 1 : 0;
    CHECK(lof == v.lack_of_fusion.size());
  }
}

TEST_CASE("lack-of-fusion region is closed towards low power and high speed") {
  for (const char* alloy : {"SS316L", "IN718", "Ti-6Al-4V"}) {
    CAPTURE(alloy);
    const ProcessMapConfig config = ProcessMapConfig::defaults();
    const ProcessMapResult r = compute_process_map(bundled_material(alloy), build(), config);
    const std::size_t nv = config.velocity_range.size();
    int violations = 0;
    for (const auto& v : r.variants) {
      for (std::size_t i = 0; i < config.power_range.size(); ++i) {
        for (std::size_t j = 0; j < nv; ++j) {
          const bool lof = v.cells[i * nv + j].lack_of_fusion;
          if (j + 1 < nv && lof && !v.cells[i * nv + j + 1].lack_of_fusion) ++violations;
          if (i + 1 < config.power_range.size() && !lof && v.cells[(i + 1) * nv + j].lack_of_fusion) {
            ++violations;
          }
        }
      }
    }
    CHECK(violations == 0);
  }
}

TEST_CASE("thicker layers never shrink the lack-of-fusion region") {
  for (const char* alloy : {"SS316L", "IN718", "Ti-6Al-4V"}) {
    const ProcessMapResult r =
        compute_process_map(bundled_material(alloy), build(), ProcessMapConfig::defaults());
    for (std::size_t k = 1; k < r.variants.size(); ++k) {
      for (std::size_t c = 0; c < r.variants[k].cells.size(); ++c) {
        if (r.variants[k - 1].cells[c].lack_of_fusion) CHECK(r.variants[k].cells[c].lack_of_fusion);
      }
    }
  }
}

TEST_CASE("a singleton power range gives a 1 x 10 grid per layer") {
  ProcessMapConfig config = ProcessMapConfig::defaults();
  config.power_range = {200};
  const ProcessMapResult r = compute_process_map(bundled_material("SS316L"), build(), config);
  for (const auto& v : r.variants) CHECK(v.cells.size() == 10);
}

TEST_CASE("thin layers clamp the negative offset to 1 um") {
  const ProcessMapResult r =
      compute_process_map(bundled_material("SS316L"), build(20.0), ProcessMapConfig::defaults());
  CHECK(r.variants[0].clamped);
  CHECK(r.variants[0].layer_height_um == doctest::Approx(1.0));
  CHECK_FALSE(r.variants[1].clamped);
  CHECK_FALSE(r.variants[2].clamped);

  const ProcessMapResult exact =
      compute_process_map(bundled_material("SS316L"), build(25.0), ProcessMapConfig::defaults());
  CHECK(exact.variants[0].clamped);
  const ProcessMapResult thick =
      compute_process_map(bundled_material("SS316L"), build(26.0), ProcessMapConfig::defaults());
  CHECK_FALSE(thick.variants[0].clamped);
  CHECK(thick.variants[0].layer_height_um == doctest::Approx(1.0));
}

TEST_CASE("vanished melt pools become lack-of-fusion cells with an error note") {
  ProcessMapConfig config = ProcessMapConfig::defaults();
  config.power_range = {1e-4, 200};
  const ProcessMapResult r = compute_process_map(bundled_material("SS316L"), build(), config);
  const ProcessMapCell& dead = r.variants[1].cells.front();
  CHECK(dead.lack_of_fusion);
  CHECK(std::isinf(dead.lof_metric));
  REQUIRE(dead.error.has_value());
  CHECK(dead.error->find("MeltPoolVanishes") != std::string::npos);

  const json j = process_map_result_to_json(r);
  CHECK(j.at("variants").at(1).at("cells").at(0).at("lof_metric").is_null());
  CHECK(process_map_result_from_json(json::parse(j.dump())) == r);
}

TEST_CASE("process map results round-trip exactly") {
  ProcessMapResult r = compute_process_map(bundled_material("IN718"), build(), ProcessMapConfig::defaults());
  r.run_id = "in718-b30";
  r.material_ref = "workspace://w/materials/in718.json";
  r.build_ref = "workspace://w/build_configs/b30.json";
  r.config_ref = "workspace://w/process_maps/in718-b30/config.json";
  CHECK(process_map_result_from_json(json::parse(process_map_result_to_json(r).dump())) == r);
}

TEST_CASE("process map results are deterministic") {
  const auto a = compute_process_map(bundled_material("Ti-6Al-4V"), build(), ProcessMapConfig::defaults());
  const auto b = compute_process_map(bundled_material("Ti-6Al-4V"), build(), ProcessMapConfig::defaults());
  CHECK(process_map_result_to_json(a).dump() == process_map_result_to_json(b).dump());
}

TEST_CASE("result loading rejects inconsistent cells") {
  const auto r = compute_process_map(bundled_material("SS316L"), build(), ProcessMapConfig::defaults());
  json j = process_map_result_to_json(r);
  j["variants"][1]["cells"][0]["lack_of_fusion"] = !j["variants"][1]["cells"][0]["lack_of_fusion"].get<bool>();
  CHECK(test::error_kind([&] { process_map_result_from_json(j); }) == "InvalidDocument");
}

TEST_CASE("plan and build documents round-trip") {
  ProcessMapPlan plan;
  plan.run_id = "run";
  plan.material_ref = DocumentRef{"w", Subfolder::Materials, "m.json"};
  plan.build_ref = DocumentRef{"w", Subfolder::BuildConfigs, "b.json"};
  plan.config = ProcessMapConfig::defaults();
  plan.config.isotherm = Isotherm::Liquidus;
  CHECK(process_map_plan_from_json(json::parse(process_map_plan_to_json(plan).dump())) == plan);

  const BuildConfig b = build(40.0, 70.0);
  CHECK(build_config_from_json(json::parse(build_config_to_json(b).dump())) == b);
}

TEST_CASE("build config validation") {
  BuildConfig b = build();
  b.layer_height = 0;
  CHECK(test::error_kind([&] { b.validate(); }) == "NonPositiveInput");
}

TEST_CASE("isotherm choice changes the reference temperature") {
  const Material m = bundled_material("SS316L");
  CHECK(rosenthal_params_for(m, 200, 0.8, 298.15, 1e-6, Isotherm::Liquidus).reference_temperature == 1723.0);
  CHECK(rosenthal_params_for(m, 200, 0.8, 298.15, 1e-6, Isotherm::Solidus).reference_temperature == 1658.0);
  CHECK(rosenthal_params_for(m, 200, 0.8, 298.15).reference_temperature == 1690.5);
  CHECK(rosenthal_params_for(m, 200, 0.8, 298.15).absorbed_power == doctest::Approx(200 * m.absorptivity));
  CHECK(test::error_kind([] { parse_isotherm("boiling"); }) == "InvalidConfig");
}

// ---------------------------------------------------------------------------

TEST_CASE("SVG figure is well-formed, titled and deterministic") {
  const auto r = compute_process_map(bundled_material("SS316L"), build(), ProcessMapConfig::defaults());
  const std::string svg = render_process_map_svg(r);
  CHECK(svg == render_process_map_svg(r));
  CHECK(svg.find("Stainless Steel 316L") != std::string::npos);
  CHECK(svg.find("hatch 50") != std::string::npos);
  CHECK(svg.find("layer 30") != std::string::npos);
  CHECK(svg.find("Scan velocity (mm/s)") != std::string::npos);
  CHECK(svg.find("Beam power (W)") != std::string::npos);

  std::istringstream in(svg);
  boost::property_tree::ptree tree;
  CHECK_NOTHROW(boost::property_tree::read_xml(in, tree));
  int panels = 0;
  for (const auto& child : tree.get_child("svg")) {
    if (child.first == "g") ++panels;
  }
  CHECK(panels == 3);
}

TEST_CASE("single-cell grid renders") {
  ProcessMapConfig config = ProcessMapConfig::defaults();
  config.power_range = {200};
  config.velocity_range = {0.8};
  const auto r = compute_process_map(bundled_material("SS316L"), build(), config);
  std::istringstream in(render_process_map_svg(r));
  boost::property_tree::ptree tree;
  CHECK_NOTHROW(boost::property_tree::read_xml(in, tree));
}

TEST_CASE("material names are escaped in the figure") {
  auto r = compute_process_map(bundled_material("SS316L"), build(), ProcessMapConfig::defaults());
  r.material_name = "A<B & \"C\"";
  std::istringstream in(render_process_map_svg(r));
  boost::property_tree::ptree tree;
  CHECK_NOTHROW(boost::property_tree::read_xml(in, tree));
}

// ---------------------------------------------------------------------------

TEST_CASE("workspace process map flow") {
  test::TempDir dir;
  WorkspaceStore store(dir.path());
  store.init_workspace("demo");
  const DocumentRef comp = create_composition(store, "demo", "ss316l", std::nullopt, "SS316L");
  const DocumentRef mat = compile_material(store, comp, ProviderConfig{});
  const DocumentRef b = create_build_config(store, "demo", "b30", build());

  const DocumentRef config_ref = init_process_map(store, "demo", b, mat);
  CHECK(config_ref.uri() == "workspace://demo/process_maps/ss316l-b30/config.json");
  const ProcessMapPlan plan = process_map_plan_from_json(store.load_document(config_ref));
  CHECK(plan.config == ProcessMapConfig::defaults());

  const DocumentRef result_ref = generate_process_map(store, config_ref);
  CHECK(result_ref.filename == "ss316l-b30/result.json");
  const ProcessMapResult r = process_map_result_from_json(store.load_document(result_ref));
  CHECK(r.config_ref == config_ref.uri());
  CHECK(r.material_ref == mat.uri());
  CHECK(r.variants.size() == 3);

  const auto svg = render_process_map(store, result_ref);
  CHECK(svg == store.resolve(result_ref).parent_path() / "process_map.svg");
  CHECK(std::filesystem::file_size(svg) > 0);
  const std::string first = read_file(svg);
  render_process_map(store, result_ref);
  CHECK(read_file(svg) == first);

  // Generating twice gives the same bytes.
  const std::string before = read_file(store.resolve(result_ref));
  generate_process_map(store, config_ref);
  CHECK(read_file(store.resolve(result_ref)) == before);

  // Re-initializing drops the stale result.
  ProcessMapOverrides o;
  o.power_range = std::vector<double>{200};
  init_process_map(store, "demo", b, mat, o);
  CHECK_FALSE(store.document_exists(result_ref));
  generate_process_map(store, config_ref);
  CHECK(process_map_result_from_json(store.load_document(result_ref)).variants[0].cells.size() == 10);
}

TEST_CASE("process map init errors") {
  test::TempDir dir;
  WorkspaceStore store(dir.path());
  store.init_workspace("demo");
  const DocumentRef comp = create_composition(store, "demo", "ss", std::nullopt, "SS316L");
  const DocumentRef mat = compile_material(store, comp, ProviderConfig{});
  const DocumentRef b = create_build_config(store, "demo", "b30", build());
  const DocumentRef missing{"demo", Subfolder::BuildConfigs, "missing.json"};

  CHECK(test::error_kind([&] { init_process_map(store, "demo", missing, mat); }) == "DocumentNotFound");
  CHECK(test::error_kind([&] { init_process_map(store, "nope", b, mat); }) == "WorkspaceNotFound");
  ProcessMapOverrides bad;
  bad.velocity_range = std::vector<double>{0.5, 0.4};
  CHECK(test::error_kind([&] { init_process_map(store, "demo", b, mat, bad); }) == "InvalidRange");
  ProcessMapOverrides evil;
  evil.run_name = "../escape";
  CHECK(test::error_kind([&] { init_process_map(store, "demo", b, mat, evil); }) == "InvalidName");
  CHECK(test::error_kind([&] {
          generate_process_map(store, DocumentRef{"demo", Subfolder::ProcessMaps, "none/config.json"});
        }) == "DocumentNotFound");
}

TEST_CASE("render reports unwritable paths and missing results") {
  test::TempDir dir;
  WorkspaceStore store(dir.path());
  store.init_workspace("demo");
  const DocumentRef comp = create_composition(store, "demo", "ss", std::nullopt, "SS316L");
  const DocumentRef mat = compile_material(store, comp, ProviderConfig{});
  const DocumentRef b = create_build_config(store, "demo", "b30", build());
  ProcessMapOverrides o;
  o.power_range = std::vector<double>{200};
  const DocumentRef result = generate_process_map(store, init_process_map(store, "demo", b, mat, o));

  std::ofstream(dir.path() / "plain.txt") << "x";
  CHECK(test::error_kind([&] { render_process_map(store, result, dir.path() / "plain.txt" / "fig.svg"); }) ==
        "UnwritablePath");
  CHECK(test::error_kind([&] {
          render_process_map(store, DocumentRef{"demo", Subfolder::ProcessMaps, "x/result.json"});
        }) == "DocumentNotFound");
}
