#pragma once

#include <cloudscope/spectrum.hpp>
#include <cloudscope/weight_transform.hpp>

#include <json.hpp>

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace cloudscope {

/// Summary of a list of values. Population standard deviation. Quartiles
/// (q1, median, q3) are reported only for n >= 3 and follow the inclusive
/// median-of-halves rule: sort, take the median; for odd n the median element
/// belongs to both halves; q1 and q3 are the medians of the lower and upper
/// half, with even-length medians interpolated halfway between the two middle
/// values. Example: {1, 2, 3, 4} gives q1 1.5, median 2.5, q3 3.5.
struct SummaryStats {
  std::size_t n = 0;
  double mean = 0.0;
  double stddev = 0.0;
  double min = 0.0;
  double max = 0.0;
  std::optional<double> q1;
  std::optional<double> median;
  std::optional<double> q3;

  nlohmann::ordered_json to_json() const;
  static SummaryStats from_json(const nlohmann::json& j);
};

SummaryStats summary_stats(std::span<const double> values);

struct NamedImage {
  std::string id;
  ScalarField image;
};

enum class BatchMode { per_image, pixelwise_mean, both };
/// Whether the pixel-wise mean of a set is taken over gray values or over
/// Beer-Lambert weights.
enum class AverageOrder { before_log, after_log };

std::string to_string(BatchMode mode);
std::string to_string(AverageOrder order);

struct AnalysisOptions {
  TransformOptions transform;
  WindowSpec window;
  FrequencyBand band = FrequencyBand::from_rho(0.02, 0.10);
  BatchMode mode = BatchMode::both;
  AverageOrder average_order = AverageOrder::before_log;
};

struct ImageCli {
  std::string id;
  double cli = 0.0;
};

struct CliReport {
  std::size_t n_images = 0;
  std::vector<ImageCli> per_image_cli; ///< sorted by id
  std::optional<double> aggregate_cli;
  FrequencyBand band;
  WindowSpec window;
  TransformOptions transform;
  BatchMode mode = BatchMode::both;
  AverageOrder average_order = AverageOrder::before_log;
  std::optional<SummaryStats> stats;
  std::vector<std::string> warnings;

  /// Keys in fixed order: n_images, band_rho_per_um, window, transform,
  /// per_image, aggregate_cli, stats, warnings.
  nlohmann::ordered_json to_json() const;
};

/// Full single-image pipeline: weights, normalization, spectrum, band sum.
double image_cli(const ScalarField& gray, const TransformOptions& transform,
                 const WindowSpec& window, const FrequencyBand& band,
                 TransformDiagnostics* diagnostics = nullptr);

/// CLI of every image and/or of the pixel-wise mean image. Images are
/// processed in id order; ids must be unique. When the mean image is analyzed
/// both averaging orders are computed and a warning is added if they differ by
/// more than one percentage point.
CliReport analyze_set(std::vector<NamedImage> images, const AnalysisOptions& opts);

} // namespace cloudscope
