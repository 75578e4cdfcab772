#include <cloudscope/report.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace cloudscope {
namespace fs = std::filesystem;
namespace {

std::string num(double v, int digits = 12) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

std::string coord(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  return out;
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out = open_out(path);
  out << content;
  if (!out) throw DataError("write failed for '" + path.string() + "'");
}

std::string escape_xml(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
    case '&': out += "&amp;"; break;
    case '<': out += "&lt;"; break;
    case '>': out += "&gt;"; break;
    case '"': out += "&quot;"; break;
    default: out += c;
    }
  }
  return out;
}

void svg_open(std::ostringstream& s, const PlotFrame& f) {
  s << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
    << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << coord(f.width) << "\" height=\""
    << coord(f.height) << "\" viewBox=\"0 0 " << coord(f.width) << ' ' << coord(f.height)
    << "\">\n"
    << svg_generator_comment() << '\n'
    << "<rect x=\"0\" y=\"0\" width=\"" << coord(f.width) << "\" height=\"" << coord(f.height)
    << "\" fill=\"white\"/>\n"
    << "<rect class=\"frame\" x=\"" << coord(f.left) << "\" y=\"" << coord(f.top) << "\" width=\""
    << coord(f.plot_width()) << "\" height=\"" << coord(f.plot_height())
    << "\" fill=\"none\" stroke=\"black\"/>\n";
}

void text(std::ostringstream& s, double x, double y, const std::string& label,
          const char* anchor = "middle", const char* extra = "") {
  s << "<text x=\"" << coord(x) << "\" y=\"" << coord(y) << "\" font-family=\"sans-serif\" "
    << "font-size=\"12\" text-anchor=\"" << anchor << "\"" << extra << ">" << escape_xml(label)
    << "</text>\n";
}

} // namespace

void write_radial_csv(const RadialSpectrum& rs, std::ostream& out) {
  out << "rho_per_um,k1_um2,count,error_weight\n";
  for (const RadialBin& b : rs.bins)
    out << num(b.rho_center) << ',' << num(b.mean_energy_density) << ',' << b.count << ','
        << num(b.error_weight) << '\n';
}

void emit_radial_csv(const RadialSpectrum& rs, const fs::path& path) {
  std::ostringstream s;
  write_radial_csv(rs, s);
  write_file(path, s.str());
}

RadialSpectrum read_radial_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != "rho_per_um,k1_um2,count,error_weight")
    throw DataError("radial CSV: missing or unexpected header");
  RadialSpectrum rs;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    RadialBin b;
    char c1 = 0, c2 = 0, c3 = 0;
    std::istringstream row(line);
    if (!(row >> b.rho_center >> c1 >> b.mean_energy_density >> c2 >> b.count >> c3 >>
          b.error_weight) ||
        c1 != ',' || c2 != ',' || c3 != ',')
      throw DataError("radial CSV: malformed row '" + line + "'");
    rs.bins.push_back(b);
  }
  if (rs.bins.size() >= 2) rs.delta_rho = rs.bins[1].rho_center - rs.bins[0].rho_center;
  return rs;
}

RadialSpectrum read_radial_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot read '" + path.string() + "'");
  return read_radial_csv(in);
}

void write_per_image_csv(std::span<const ImageCli> rows, std::ostream& out) {
  out << "id,cli\n";
  for (const ImageCli& r : rows) {
    const bool quote = r.id.find_first_of(",\"\n") != std::string::npos;
    if (quote) {
      std::string escaped;
      for (char c : r.id) escaped += c == '"' ? std::string("\"\"") : std::string(1, c);
      out << '"' << escaped << '"';
    } else {
      out << r.id;
    }
    out << ',' << num(r.cli, 17) << '\n';
  }
}

void write_json(const nlohmann::ordered_json& j, const fs::path& path) {
  write_file(path, j.dump(2) + "\n");
}

std::string svg_generator_comment() {
  return std::string("<!-- generator: cloudscope ") + CLOUDSCOPE_VERSION + " -->";
}

double boxplot_y(const PlotFrame& frame, double value) {
  return frame.top + (1.0 - value) * frame.plot_height();
}

std::string radial_svg(const RadialSpectrum& rs, const PlotFrame& f) {
  std::vector<std::pair<double, double>> pts;
  for (const RadialBin& b : rs.bins)
    if (b.rho_center > 0 && b.mean_energy_density > 0)
      pts.emplace_back(std::log10(b.rho_center), std::log10(b.mean_energy_density));
  if (pts.empty()) throw DataError("radial plot: no positive data");

  auto [xmin_it, xmax_it] = std::minmax_element(
      pts.begin(), pts.end(), [](auto& a, auto& b) { return a.first < b.first; });
  auto [ymin_it, ymax_it] = std::minmax_element(
      pts.begin(), pts.end(), [](auto& a, auto& b) { return a.second < b.second; });
  // Axes snap to whole decades.
  double x0 = std::floor(xmin_it->first), x1 = std::ceil(xmax_it->first);
  double y0 = std::floor(ymin_it->second), y1 = std::ceil(ymax_it->second);
  if (x1 <= x0) x1 = x0 + 1;
  if (y1 <= y0) y1 = y0 + 1;

  auto px = [&](double lx) { return f.left + (lx - x0) / (x1 - x0) * f.plot_width(); };
  auto py = [&](double ly) { return f.top + (y1 - ly) / (y1 - y0) * f.plot_height(); };

  std::ostringstream s;
  svg_open(s, f);
  for (double d = x0; d <= x1; d += 1) {
    s << "<line class=\"tick\" x1=\"" << coord(px(d)) << "\" y1=\"" << coord(f.height - f.bottom)
      << "\" x2=\"" << coord(px(d)) << "\" y2=\"" << coord(f.height - f.bottom + 5)
      << "\" stroke=\"black\"/>\n";
    text(s, px(d), f.height - f.bottom + 18, "1e" + num(d));
  }
  for (double d = y0; d <= y1; d += 1) {
    s << "<line class=\"tick\" x1=\"" << coord(f.left - 5) << "\" y1=\"" << coord(py(d))
      << "\" x2=\"" << coord(f.left) << "\" y2=\"" << coord(py(d)) << "\" stroke=\"black\"/>\n";
    text(s, f.left - 8, py(d) + 4, "1e" + num(d), "end");
  }
  text(s, f.left + f.plot_width() / 2, f.height - 10, "rho [1/um]");
  text(s, 15, f.top + f.plot_height() / 2, "k1 [um^2]", "middle",
       (" transform=\"rotate(-90 15 " + coord(f.top + f.plot_height() / 2) + ")\"").c_str());

  if (pts.size() >= 2) {
    s << "<polyline class=\"curve\" fill=\"none\" stroke=\"steelblue\" points=\"";
    for (std::size_t i = 0; i < pts.size(); ++i)
      s << (i ? " " : "") << coord(px(pts[i].first)) << ',' << coord(py(pts[i].second));
    s << "\"/>\n";
  }
  for (const auto& [lx, ly] : pts)
    s << "<circle class=\"point\" cx=\"" << coord(px(lx)) << "\" cy=\"" << coord(py(ly))
      << "\" r=\"2\" fill=\"steelblue\"/>\n";
  s << "</svg>\n";
  return s.str();
}

void emit_svg_plot(const RadialSpectrum& rs, const fs::path& path) {
  write_file(path, radial_svg(rs));
}

std::string boxplot_svg(std::span<const BoxGroup> groups, const PlotFrame& f) {
  if (groups.empty()) throw DataError("box plot: no groups");
  std::ostringstream s;
  svg_open(s, f);
  for (int i = 0; i <= 10; ++i) {
    const double v = i / 10.0;
    s << "<line class=\"tick\" x1=\"" << coord(f.left - 5) << "\" y1=\"" << coord(boxplot_y(f, v))
      << "\" x2=\"" << coord(f.left) << "\" y2=\"" << coord(boxplot_y(f, v))
      << "\" stroke=\"black\"/>\n";
    text(s, f.left - 8, boxplot_y(f, v) + 4, num(v, 2), "end");
  }
  text(s, 15, f.top + f.plot_height() / 2, "CLI", "middle",
       (" transform=\"rotate(-90 15 " + coord(f.top + f.plot_height() / 2) + ")\"").c_str());

  const double slot = f.plot_width() / static_cast<double>(groups.size());
  for (std::size_t g = 0; g < groups.size(); ++g) {
    const SummaryStats& st = groups[g].stats;
    const double cx = f.left + (static_cast<double>(g) + 0.5) * slot;
    const double half = 0.25 * slot;
    s << "<g class=\"box\">\n";
    s << "<line class=\"whisker\" x1=\"" << coord(cx) << "\" y1=\"" << coord(boxplot_y(f, st.min))
      << "\" x2=\"" << coord(cx) << "\" y2=\"" << coord(boxplot_y(f, st.max))
      << "\" stroke=\"black\"/>\n";
    for (double v : {st.min, st.max})
      s << "<line class=\"cap\" x1=\"" << coord(cx - half / 2) << "\" y1=\""
        << coord(boxplot_y(f, v)) << "\" x2=\"" << coord(cx + half / 2) << "\" y2=\""
        << coord(boxplot_y(f, v)) << "\" stroke=\"black\"/>\n";
    if (st.q1 && st.q3 && st.median) {
      s << "<rect class=\"iqr\" x=\"" << coord(cx - half) << "\" y=\""
        << coord(boxplot_y(f, *st.q3)) << "\" width=\"" << coord(2 * half) << "\" height=\""
        << coord(boxplot_y(f, *st.q1) - boxplot_y(f, *st.q3))
        << "\" fill=\"lightsteelblue\" stroke=\"black\"/>\n";
      s << "<line class=\"median\" x1=\"" << coord(cx - half) << "\" y1=\""
        << coord(boxplot_y(f, *st.median)) << "\" x2=\"" << coord(cx + half) << "\" y2=\""
        << coord(boxplot_y(f, *st.median)) << "\" stroke=\"black\" stroke-width=\"2\"/>\n";
    } else {
      s << "<circle class=\"mean\" cx=\"" << coord(cx) << "\" cy=\"" << coord(boxplot_y(f, st.mean))
        << "\" r=\"3\"/>\n";
    }
    s << "</g>\n";
    text(s, cx, f.height - f.bottom + 18, groups[g].name);
  }
  s << "</svg>\n";
  return s.str();
}

void emit_svg_plot(std::span<const BoxGroup> groups, const fs::path& path) {
  write_file(path, boxplot_svg(groups));
}

} // namespace cloudscope
