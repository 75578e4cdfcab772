#pragma once

#include <cloudscope/field.hpp>

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace cloudscope {

struct TransformOptions {
  enum class Mode { beer_lambert, linear };
  enum class ZeroPolicy { error, clamp_to_min_positive };

  Mode mode = Mode::beer_lambert;
  /// Incident intensity g0. Defaults to the maximum pixel value of the image.
  std::optional<double> incident_intensity;
  ZeroPolicy zero_policy = ZeroPolicy::error;
};

std::string to_string(TransformOptions::Mode mode);
std::string to_string(TransformOptions::ZeroPolicy policy);

/// What log_attenuation had to do to the data; surfaced as report warnings.
struct TransformDiagnostics {
  Eigen::Index clamped_pixels = 0;
  double clamp_value = 0.0;
  double g0 = 0.0;
  /// Pixels brighter than g0, which produce negative weights.
  Eigen::Index above_g0_pixels = 0;

  std::vector<std::string> warnings() const;
};

/// Beer-Lambert weight w = -ln(g / g0), or the identity in linear mode.
ScalarField log_attenuation(const ScalarField& image, const TransformOptions& opts,
                            TransformDiagnostics* diagnostics = nullptr);

struct NormalizedWeight {
  ScalarField field;
  double mean;
  double stddev;
};

/// (w - mean) / stddev with population moments over all pixels.
NormalizedWeight normalize_relative_weight(const ScalarField& field);

/// Per-pixel arithmetic mean of fields sharing geometry and kind. The sum runs
/// in list order, so the result is deterministic for a given order.
ScalarField pixelwise_mean(std::span<const ScalarField> fields);

} // namespace cloudscope
