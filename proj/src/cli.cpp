#include <cloudscope/cli.hpp>

#include <cloudscope/batch.hpp>
#include <cloudscope/field_io.hpp>
#include <cloudscope/grf_sim.hpp>
#include <cloudscope/report.hpp>

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <glob.h>
#include <iostream>
#include <optional>
#include <sstream>

namespace cloudscope::cli {
namespace fs = std::filesystem;
namespace {

struct Options {
  std::vector<std::string> inputs;
  double pixel_size = 0.0;
  std::string band = "0.02:0.10";
  std::string wavelengths;
  std::string window = "hann";
  bool no_log = false;
  std::optional<double> g0;
  std::string zero_policy = "error";
  std::string mode = "both";
  bool average_after_log = false;
  std::string preset;
  std::uint64_t seed = 0;
  int depth = 16;
  std::optional<double> absorption;
  std::string out, csv, svg;
  std::string radial_in, report_in;
};

std::pair<double, double> parse_range(const std::string& text, const std::string& flag) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw UsageError(flag + " expects lo:hi, got '" + text + "'");
  try {
    std::size_t a = 0, b = 0;
    const double lo = std::stod(text.substr(0, colon), &a);
    const double hi = std::stod(text.substr(colon + 1), &b);
    if (a != colon || b != text.size() - colon - 1) throw std::invalid_argument(text);
    return {lo, hi};
  } catch (const std::logic_error&) {
    throw UsageError(flag + " expects two numbers lo:hi, got '" + text + "'");
  }
}

FrequencyBand band_from(const Options& o) {
  if (!o.wavelengths.empty()) {
    const auto [a, b] = parse_range(o.wavelengths, "--wavelengths");
    return FrequencyBand::from_wavelengths(a, b);
  }
  const auto [lo, hi] = parse_range(o.band, "--band");
  return FrequencyBand::from_rho(lo, hi);
}

AnalysisOptions analysis_from(const Options& o) {
  AnalysisOptions a;
  a.band = band_from(o);
  a.window.kind = o.window == "none" ? WindowSpec::Kind::none : WindowSpec::Kind::hann;
  a.transform.mode = o.no_log ? TransformOptions::Mode::linear : TransformOptions::Mode::beer_lambert;
  a.transform.incident_intensity = o.g0;
  a.transform.zero_policy = o.zero_policy == "clamp" ? TransformOptions::ZeroPolicy::clamp_to_min_positive
                                                     : TransformOptions::ZeroPolicy::error;
  a.mode = o.mode == "per-image" ? BatchMode::per_image
           : o.mode == "mean"    ? BatchMode::pixelwise_mean
                                 : BatchMode::both;
  a.average_order = o.average_after_log ? AverageOrder::after_log : AverageOrder::before_log;
  return a;
}

bool is_image_file(const fs::path& p) {
  std::string ext = p.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  return ext == ".png" || ext == ".pgm" || ext == ".pnm";
}

/// A path, a directory (all PNG/PGM files in it) or a glob pattern.
std::vector<std::string> expand_input(const std::string& arg) {
  std::vector<std::string> files;
  if (fs::is_directory(arg)) {
    for (const auto& e : fs::directory_iterator(arg))
      if (e.is_regular_file() && is_image_file(e.path())) files.push_back(e.path().string());
  } else if (arg.find_first_of("*?[") != std::string::npos) {
    glob_t g{};
    if (::glob(arg.c_str(), 0, nullptr, &g) == 0)
      for (std::size_t i = 0; i < g.gl_pathc; ++i) files.emplace_back(g.gl_pathv[i]);
    globfree(&g);
  } else {
    files.push_back(arg);
  }
  if (files.empty()) throw DataError("no images match '" + arg + "'");
  std::sort(files.begin(), files.end());
  return files;
}

std::vector<NamedImage> load_set(const std::vector<std::string>& files, double pixel_size) {
  std::vector<NamedImage> images;
  for (const std::string& f : files) images.push_back({f, load_image(f, pixel_size)});
  return images;
}

void require_pixel_size(const Options& o) {
  if (!(o.pixel_size > 0)) throw UsageError("--pixel-size must be given and positive");
}

/// Checks the band against the first image's geometry before any heavy work.
void check_band(const FrequencyBand& band, const ScalarField& first) {
  const FrequencyBand checked = valid_band(band, first.width(), first.height(), first.pixel_size());
  if (checked.status != FrequencyBand::Status::valid)
    throw DataError(describe_band_problem(
        checked, band_limits(first.width(), first.height(), first.pixel_size())));
}

void emit_text(const std::string& path, const std::string& content, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << content;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw DataError("cannot write '" + path + "'");
  f << content;
}

int cmd_analyze(const Options& o, std::ostream& out) {
  require_pixel_size(o);
  std::vector<std::string> files;
  for (const std::string& in : o.inputs)
    for (std::string& f : expand_input(in)) files.push_back(std::move(f));
  std::vector<NamedImage> images = load_set(files, o.pixel_size);
  const AnalysisOptions opts = analysis_from(o);
  check_band(opts.band, images.front().image);

  const CliReport report = analyze_set(std::move(images), opts);
  emit_text(o.out, report.to_json().dump(2) + "\n", out);
  if (!o.csv.empty()) {
    std::ostringstream s;
    write_per_image_csv(report.per_image_cli, s);
    emit_text(o.csv, s.str(), out);
  }
  if (!o.svg.empty()) {
    const BoxGroup group{"images", *report.stats};
    emit_svg_plot(std::span<const BoxGroup>(&group, 1), o.svg);
  }
  return exit_ok;
}

int cmd_batch(const Options& o, std::ostream& out) {
  require_pixel_size(o);
  const AnalysisOptions opts = analysis_from(o);
  nlohmann::ordered_json j;
  j["groups"] = nlohmann::ordered_json::array();
  std::vector<BoxGroup> boxes;
  std::vector<ImageCli> rows;
  bool band_checked = false;
  for (const std::string& group : o.inputs) {
    std::vector<NamedImage> images = load_set(expand_input(group), o.pixel_size);
    if (!band_checked) {
      check_band(opts.band, images.front().image);
      band_checked = true;
    }
    const CliReport report = analyze_set(std::move(images), opts);
    nlohmann::ordered_json g;
    g["group"] = group;
    const nlohmann::ordered_json body = report.to_json();
    for (const auto& [key, value] : body.items()) g[key] = value;
    j["groups"].push_back(g);
    boxes.push_back({group, *report.stats});
    rows.insert(rows.end(), report.per_image_cli.begin(), report.per_image_cli.end());
  }
  emit_text(o.out, j.dump(2) + "\n", out);
  if (!o.csv.empty()) {
    std::ostringstream s;
    write_per_image_csv(rows, s);
    emit_text(o.csv, s.str(), out);
  }
  if (!o.svg.empty()) emit_svg_plot(boxes, o.svg);
  return exit_ok;
}

int cmd_radial(const Options& o, std::ostream& out) {
  require_pixel_size(o);
  std::vector<std::string> files;
  for (const std::string& in : o.inputs)
    for (std::string& f : expand_input(in)) files.push_back(std::move(f));
  std::vector<ScalarField> grays;
  for (const std::string& f : files) grays.push_back(load_image(f, o.pixel_size));
  const AnalysisOptions opts = analysis_from(o);

  const ScalarField mean = pixelwise_mean(grays);
  const ScalarField weights = log_attenuation(mean, opts.transform);
  const PowerSpectrum2D ps =
      power_spectrum_2d(normalize_relative_weight(weights).field, opts.window);
  const RadialSpectrum rs = radial_mean(ps);

  std::ostringstream s;
  write_radial_csv(rs, s);
  emit_text(!o.csv.empty() ? o.csv : o.out, s.str(), out);
  if (!o.svg.empty()) emit_svg_plot(rs, o.svg);
  return exit_ok;
}

int cmd_simulate(const Options& o, std::ostream&) {
  if (o.preset.empty()) throw UsageError("simulate needs --preset sim1..sim4");
  if (o.out.empty()) throw UsageError("simulate needs --out <image path>");
  if (o.depth != 8 && o.depth != 16) throw UsageError("--depth must be 8 or 16");
  const SimPreset preset = sim_preset(o.preset);
  const ScalarField field = simulate_preset(preset, o.seed);

  const double g0 = o.g0.value_or(o.depth == 16 ? 60000.0 : 250.0);
  const double range = field.values().maxCoeff() - field.values().minCoeff();
  // Default contrast: the densest pixel transmits exp(-2) of the incident light.
  const double absorption = o.absorption.value_or(range > 0 ? 2.0 / range : 1.0);
  const ScalarField image = to_transmission_image(field, g0, absorption);
  const ImageMapping mapping = save_image(image, o.out, o.depth);

  nlohmann::ordered_json meta;
  meta["preset"] = preset.name;
  meta["seed"] = o.seed;
  meta["width"] = preset.width;
  meta["height"] = preset.height;
  meta["pixel_size_um"] = preset.pixel_size;
  meta["fiber_diameter_um"] = preset.fibers.fiber_diameter;
  meta["mean_length_um"] = preset.fibers.mean_length;
  meta["segment_intensity_per_um2"] = preset.fibers.intensity;
  meta["fiber_coverage"] = default_fiber_coverage;
  meta["grf_lambda_um"] = preset.grf.lambda;
  meta["grf_waves"] = preset.grf.n_waves;
  meta["fiber_weight"] = preset.mix.fiber_weight;
  meta["grf_weight"] = preset.mix.grf_weight;
  meta["g0"] = g0;
  meta["absorption"] = absorption;
  write_sidecar(o.out, mapping, {{"simulation", meta}});
  return exit_ok;
}

int cmd_plot(const Options& o, std::ostream&) {
  if (o.svg.empty()) throw UsageError("plot needs --svg <path>");
  if (o.radial_in.empty() == o.report_in.empty())
    throw UsageError("plot needs exactly one of --radial <csv> or --report <json>");
  if (!o.radial_in.empty()) {
    emit_svg_plot(read_radial_csv(fs::path(o.radial_in)), o.svg);
    return exit_ok;
  }
  std::ifstream in(o.report_in);
  if (!in) throw DataError("cannot read '" + o.report_in + "'");
  const nlohmann::json j = nlohmann::json::parse(in);
  std::vector<BoxGroup> boxes;
  if (j.contains("groups")) {
    for (const auto& g : j.at("groups"))
      boxes.push_back({g.at("group").get<std::string>(), SummaryStats::from_json(g.at("stats"))});
  } else {
    boxes.push_back({fs::path(o.report_in).stem().string(), SummaryStats::from_json(j.at("stats"))});
  }
  emit_svg_plot(boxes, o.svg);
  return exit_ok;
}

void add_analysis_flags(CLI::App* cmd, Options& o) {
  cmd->add_option("--pixel-size", o.pixel_size, "Pixel size in um")->required();
  auto* band = cmd->add_option("--band", o.band, "Frequency band lo:hi in 1/um (angular)");
  cmd->add_option("--wavelengths", o.wavelengths, "Band as a wavelength range lo:hi in um")
      ->excludes(band);
  cmd->add_option("--window", o.window, "Window function")
      ->check(CLI::IsMember({"hann", "none"}));
  cmd->add_flag("--no-log", o.no_log, "Use gray values directly as weights");
  cmd->add_option("--g0", o.g0, "Incident intensity (default: image maximum)");
  cmd->add_option("--zero-policy", o.zero_policy, "Handling of zero pixels")
      ->check(CLI::IsMember({"error", "clamp"}));
  cmd->add_option("--out", o.out, "Output path (default: stdout)");
}

} // namespace

int run(std::span<const std::string> args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"cloudscope: cloudiness index of nonwoven images from the power spectrum", "cloudscope"};
  app.require_subcommand(1);

  auto* analyze = app.add_subcommand("analyze", "Cloudiness index of a set of images");
  add_analysis_flags(analyze, o);
  analyze->add_option("inputs", o.inputs, "Images, directories or glob patterns")->required();
  analyze->add_option("--mode", o.mode, "Per-image CLI, CLI of the mean image, or both")
      ->check(CLI::IsMember({"per-image", "mean", "both"}));
  analyze->add_flag("--average-after-log", o.average_after_log,
                    "Average Beer-Lambert weights instead of gray values");
  analyze->add_option("--csv", o.csv, "Per-image CSV output");
  analyze->add_option("--svg", o.svg, "Box plot of the per-image CLI");

  auto* batch = app.add_subcommand("batch", "Analyze several sample groups, one per input");
  add_analysis_flags(batch, o);
  batch->add_option("inputs", o.inputs, "One directory or glob pattern per group")->required();
  batch->add_option("--mode", o.mode, "Per-image CLI, CLI of the mean image, or both")
      ->check(CLI::IsMember({"per-image", "mean", "both"}));
  batch->add_flag("--average-after-log", o.average_after_log,
                  "Average Beer-Lambert weights instead of gray values");
  batch->add_option("--csv", o.csv, "Per-image CSV output");
  batch->add_option("--svg", o.svg, "Box plot with one box per group");

  auto* radial = app.add_subcommand("radial", "Rotation mean of the power spectrum as CSV");
  add_analysis_flags(radial, o);
  radial->add_option("inputs", o.inputs, "Images (averaged pixel-wise)")->required();
  radial->add_option("--csv", o.csv, "CSV output (default: --out or stdout)");
  radial->add_option("--svg", o.svg, "Log-log plot");

  auto* simulate = app.add_subcommand("simulate", "Synthetic transmission image from a preset");
  simulate->add_option("--preset", o.preset, "Simulation preset")
      ->check(CLI::IsMember({"sim1", "sim2", "sim3", "sim4"}))
      ->required();
  simulate->add_option("--seed", o.seed, "Random seed");
  simulate->add_option("--out", o.out, "Output image (.png or .pgm)")->required();
  simulate->add_option("--depth", o.depth, "Bit depth (8 or 16)");
  simulate->add_option("--g0", o.g0, "Incident intensity of the rendered image");
  simulate->add_option("--absorption", o.absorption, "Absorption per unit of field value");

  auto* plot = app.add_subcommand("plot", "SVG plot of a radial CSV or a CLI report");
  plot->add_option("--radial", o.radial_in, "Radial spectrum CSV");
  plot->add_option("--report", o.report_in, "Report JSON from analyze or batch");
  plot->add_option("--svg", o.svg, "Output SVG")->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return exit_ok;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return exit_ok;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return exit_usage;
  }

  try {
    if (analyze->parsed()) return cmd_analyze(o, out);
    if (batch->parsed()) return cmd_batch(o, out);
    if (radial->parsed()) return cmd_radial(o, out);
    if (simulate->parsed()) return cmd_simulate(o, out);
    if (plot->parsed()) return cmd_plot(o, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return exit_usage;
  } catch (const DataError& e) {
    err << "error: " << e.what() << '\n';
    return exit_data;
  } catch (const nlohmann::json::exception& e) {
    err << "error: " << e.what() << '\n';
    return exit_data;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return exit_data;
  }
  return exit_usage;
}

} // namespace cloudscope::cli
