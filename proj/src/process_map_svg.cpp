#include <cstdio>
#include <fstream>
#include <sstream>

#include "printmap/process_map.hpp"

namespace printmap {

namespace {

constexpr double kPanelWidth = 300.0;
constexpr double kPanelHeight = 260.0;
constexpr double kLeft = 80.0;
constexpr double kPanelGap = 110.0;
constexpr double kTop = 80.0;
constexpr double kBottom = 90.0;

constexpr const char* kLofFill = "#d9534f";
constexpr const char* kPrintableFill = "#5cb85c";

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  std::string s = buf;
  while (s.back() == '0') s.pop_back();
  if (s.back() == '.') s.pop_back();
  if (s == "-0") s = "0";
  return s;
}

std::string label(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

std::string escape_xml(std::string_view text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += c;
    }
  }
  return out;
}

// Keep at most ~10 tick labels per axis.
std::size_t tick_stride(std::size_t n) { return n <= 10 ? 1 : (n + 9) / 10; }

void text(std::ostringstream& out, double x, double y, std::string_view body,
          std::string_view anchor = "middle", int size = 12, std::string_view extra = {}) {
  out << "  <text x=\"" << num(x) << "\" y=\"" << num(y) << "\" font-size=\"" << size
      << "\" text-anchor=\"" << anchor << "\"";
  if (!extra.empty()) out << ' ' << extra;
  out << '>' << escape_xml(body) << "</text>\n";
}

}  // namespace

std::string render_process_map_svg(const ProcessMapResult& result) {
  const std::size_t n_power = result.power_range_w.size();
  const std::size_t n_velocity = result.velocity_range_mm_s.size();
  const std::size_t n_panels = result.variants.size();
  const double width = kLeft + n_panels * kPanelWidth + (n_panels - 1) * kPanelGap + 40.0;
  const double height = kTop + kPanelHeight + kBottom;

  std::ostringstream out;
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(width) << "\" height=\""
      << num(height) << "\" viewBox=\"0 0 " << num(width) << ' ' << num(height)
      << "\" font-family=\"sans-serif\">\n";
  out << "  <rect x=\"0\" y=\"0\" width=\"" << num(width) << "\" height=\"" << num(height)
      << "\" fill=\"#ffffff\"/>\n";
  text(out, width / 2, 28,
       "Lack-of-fusion process map: " + result.material_name + " (hatch " +
           label(result.hatch_spacing_um) + " \xC2\xB5m, " + std::string(to_string(result.isotherm)) +
           " isotherm)",
       "middle", 16);

  const double cell_w = n_velocity ? kPanelWidth / n_velocity : kPanelWidth;
  const double cell_h = n_power ? kPanelHeight / n_power : kPanelHeight;

  for (std::size_t p = 0; p < n_panels; ++p) {
    const LayerVariant& variant = result.variants[p];
    const double x0 = kLeft + p * (kPanelWidth + kPanelGap);
    const double y0 = kTop;

    std::string subtitle = "layer " + label(variant.layer_height_um) + " \xC2\xB5m (offset " +
                           (variant.layer_offset_um > 0 ? "+" : "") +
                           label(variant.layer_offset_um) + " \xC2\xB5m" +
                           (variant.clamped ? ", clamped" : "") + ")";
    text(out, x0 + kPanelWidth / 2, y0 - 12, subtitle, "middle", 13);

    out << "  <g class=\"panel\" data-layer-um=\"" << label(variant.layer_height_um) << "\">\n";
    for (std::size_t i = 0; i < variant.cells.size(); ++i) {
      const ProcessMapCell& cell = variant.cells[i];
      const std::size_t row = i / n_velocity;  // power index, drawn bottom-up
      const std::size_t col = i % n_velocity;
      const double x = x0 + col * cell_w;
      const double y = y0 + kPanelHeight - (row + 1) * cell_h;
      out << "    <rect x=\"" << num(x) << "\" y=\"" << num(y) << "\" width=\"" << num(cell_w)
          << "\" height=\"" << num(cell_h) << "\" fill=\""
          << (cell.lack_of_fusion ? kLofFill : kPrintableFill)
          << "\" stroke=\"#ffffff\" stroke-width=\"0.5\">";
      out << "<title>" << label(cell.power_w) << " W, " << label(cell.velocity_mm_s) << " mm/s: "
          << (cell.error ? "no melt pool" : cell.lack_of_fusion ? "lack of fusion" : "printable")
          << "</title></rect>\n";
    }
    out << "  </g>\n";
    out << "  <rect x=\"" << num(x0) << "\" y=\"" << num(y0) << "\" width=\"" << num(kPanelWidth)
        << "\" height=\"" << num(kPanelHeight) << "\" fill=\"none\" stroke=\"#333333\"/>\n";

    const std::size_t vs = tick_stride(n_velocity);
    for (std::size_t c = 0; c < n_velocity; c += vs) {
      text(out, x0 + (c + 0.5) * cell_w, y0 + kPanelHeight + 16,
           label(result.velocity_range_mm_s[c]), "middle", 10);
    }
    const std::size_t ps = tick_stride(n_power);
    for (std::size_t r = 0; r < n_power; r += ps) {
      text(out, x0 - 6, y0 + kPanelHeight - (r + 0.5) * cell_h + 4,
           label(result.power_range_w[r]), "end", 10);
    }
    text(out, x0 + kPanelWidth / 2, y0 + kPanelHeight + 36, "Scan velocity (mm/s)", "middle", 12);
    const double ly = y0 + kPanelHeight / 2;
    const double lx = x0 - 50;
    text(out, lx, ly, "Beam power (W)", "middle", 12,
         "transform=\"rotate(-90 " + num(lx) + ' ' + num(ly) + ")\"");
  }

  const double legend_y = kTop + kPanelHeight + 60;
  out << "  <rect x=\"" << num(kLeft) << "\" y=\"" << num(legend_y) << "\" width=\"14\" height=\"14\" fill=\""
      << kLofFill << "\"/>\n";
  text(out, kLeft + 20, legend_y + 11, "lack of fusion", "start", 12);
  out << "  <rect x=\"" << num(kLeft + 140) << "\" y=\"" << num(legend_y)
      << "\" width=\"14\" height=\"14\" fill=\"" << kPrintableFill << "\"/>\n";
  text(out, kLeft + 160, legend_y + 11, "printable", "start", 12);
  out << "</svg>\n";
  return out.str();
}

std::filesystem::path render_process_map(const WorkspaceStore& store, const DocumentRef& result_ref,
                                         const std::filesystem::path& output_path) {
  const ProcessMapResult result = process_map_result_from_json(store.load_document(result_ref));
  std::filesystem::path target = output_path;
  if (target.empty()) target = store.resolve(result_ref).parent_path() / "process_map.svg";

  const std::string svg = render_process_map_svg(result);
  std::error_code ec;
  if (target.has_parent_path()) std::filesystem::create_directories(target.parent_path(), ec);
  std::ofstream file(target, std::ios::binary | std::ios::trunc);
  if (!file || !(file << svg) || !file.flush()) {
    throw Error(ErrorKind::UnwritablePath, "cannot write figure to " + target.string(),
                {{"path", target.string()}});
  }
  return target;
}

}  // namespace printmap
