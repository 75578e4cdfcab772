#pragma once

#include <cloudscope/batch.hpp>
#include <cloudscope/spectrum.hpp>

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace cloudscope {

/// Radial spectrum CSV: header `rho_per_um,k1_um2,count,error_weight`, one row
/// per annulus in ascending rho, numbers printed with 12 significant digits.
void write_radial_csv(const RadialSpectrum& rs, std::ostream& out);
void emit_radial_csv(const RadialSpectrum& rs, const std::filesystem::path& path);
RadialSpectrum read_radial_csv(std::istream& in);
RadialSpectrum read_radial_csv(const std::filesystem::path& path);

/// Per-image CSV: `id,cli`.
void write_per_image_csv(std::span<const ImageCli> rows, std::ostream& out);

void write_json(const nlohmann::ordered_json& j, const std::filesystem::path& path);

struct BoxGroup {
  std::string name;
  SummaryStats stats;
};

/// Plot geometry shared by both SVG kinds. The plot area spans
/// [left, width - right] x [top, height - bottom] in SVG user units.
struct PlotFrame {
  double width = 640.0;
  double height = 480.0;
  double left = 70.0;
  double right = 20.0;
  double top = 20.0;
  double bottom = 50.0;

  double plot_width() const { return width - left - right; }
  double plot_height() const { return height - top - bottom; }
};

/// Vertical coordinate of a CLI value in the box plot: the axis is linear over
/// [0, 1], y = top + (1 - v) * plot_height.
double boxplot_y(const PlotFrame& frame, double value);

/// Log-log plot of k1 (µm^2) over rho (1/µm); one <circle class="point"> per
/// annulus with positive density, joined by a polyline.
void emit_svg_plot(const RadialSpectrum& rs, const std::filesystem::path& path);
std::string radial_svg(const RadialSpectrum& rs, const PlotFrame& frame = {});

/// Box plot with one box per group on a shared [0, 1] axis: whiskers from min
/// to max, a box from q1 to q3 and a <line class="median">. Groups without
/// quartiles (fewer than 3 values) show the whisker and a mean marker only.
void emit_svg_plot(std::span<const BoxGroup> groups, const std::filesystem::path& path);
std::string boxplot_svg(std::span<const BoxGroup> groups, const PlotFrame& frame = {});

/// Comment line embedded in every SVG; the only part that depends on the
/// generator version.
std::string svg_generator_comment();

} // namespace cloudscope
