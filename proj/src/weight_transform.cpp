#include <cloudscope/weight_transform.hpp>
#include <cloudscope/stats.hpp>

#include <cmath>
#include <limits>
#include <sstream>

namespace cloudscope {

std::string to_string(TransformOptions::Mode mode) {
  return mode == TransformOptions::Mode::beer_lambert ? "beer_lambert" : "linear";
}

std::string to_string(TransformOptions::ZeroPolicy policy) {
  return policy == TransformOptions::ZeroPolicy::error ? "error" : "clamp_to_min_positive";
}

std::vector<std::string> TransformDiagnostics::warnings() const {
  std::vector<std::string> out;
  if (clamped_pixels > 0) {
    std::ostringstream s;
    s << clamped_pixels << " zero pixel(s) clamped to " << clamp_value;
    out.push_back(s.str());
  }
  if (above_g0_pixels > 0) {
    std::ostringstream s;
    s << above_g0_pixels << " pixel(s) brighter than incident intensity " << g0
      << " give negative weights";
    out.push_back(s.str());
  }
  return out;
}

ScalarField log_attenuation(const ScalarField& image, const TransformOptions& opts,
                            TransformDiagnostics* diagnostics) {
  if (image.kind() != FieldKind::gray_image)
    throw UsageError("log_attenuation expects a gray image, got " +
                     std::string(to_string(image.kind())));
  const auto& g = image.values();
  if ((g < 0).any()) throw DataError("negative gray values");

  TransformDiagnostics diag;
  if (opts.mode == TransformOptions::Mode::linear) {
    if (diagnostics) *diagnostics = diag;
    return image.with_kind(FieldKind::weight_field);
  }

  Grid<double> gray = g;
  const Eigen::Index zeros = (gray == 0).count();
  if (zeros > 0) {
    if (opts.zero_policy == TransformOptions::ZeroPolicy::error)
      throw DataError(std::to_string(zeros) +
                      " zero pixel(s): Beer-Lambert transform undefined (use the clamp policy)");
    const double min_positive = (gray > 0).select(gray, std::numeric_limits<double>::infinity()).minCoeff();
    if (!std::isfinite(min_positive)) throw DataError("image has no positive pixel");
    gray = (gray == 0).select(min_positive, gray);
    diag.clamped_pixels = zeros;
    diag.clamp_value = min_positive;
  }

  const double g0 = opts.incident_intensity.value_or(gray.maxCoeff());
  if (!(g0 > 0) || !std::isfinite(g0)) throw UsageError("incident intensity must be positive");
  diag.g0 = g0;
  diag.above_g0_pixels = (gray > g0).count();
  if (diagnostics) *diagnostics = diag;

  return image.with_values(-(gray / g0).log(), FieldKind::weight_field);
}

NormalizedWeight normalize_relative_weight(const ScalarField& field) {
  const auto& w = field.values();
  const double mean = population_mean(w);
  const double sd = population_stddev(w);
  if (!(sd > 0) || w.maxCoeff() == w.minCoeff())
    throw DataError("zero variance: cloudiness undefined");
  return {field.with_values((w - mean) / sd, FieldKind::normalized_weight), mean, sd};
}

ScalarField pixelwise_mean(std::span<const ScalarField> fields) {
  if (fields.empty()) throw UsageError("pixelwise_mean of an empty list");
  const ScalarField& first = fields.front();
  Grid<double> sum = first.values();
  for (std::size_t i = 1; i < fields.size(); ++i) {
    if (!fields[i].same_geometry(first))
      throw DataError("pixelwise_mean: field " + std::to_string(i) +
                      " differs in shape or pixel size");
    if (fields[i].kind() != first.kind())
      throw DataError("pixelwise_mean: field " + std::to_string(i) + " differs in kind");
    sum += fields[i].values();
  }
  if (fields.size() == 1) return first;
  return first.with_values(sum / static_cast<double>(fields.size()), first.kind());
}

} // namespace cloudscope
