#include <cloudscope/batch.hpp>
#include <cloudscope/parallel.hpp>

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numeric>
#include <sstream>

namespace cloudscope {
namespace {

double median_of_sorted(std::span<const double> v) {
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

template <typename Error>
[[noreturn]] void rethrow_with_id(const std::string& id, const Error& e) {
  throw Error("image " + id + ": " + e.what());
}

} // namespace

std::string to_string(BatchMode mode) {
  switch (mode) {
  case BatchMode::per_image: return "per_image";
  case BatchMode::pixelwise_mean: return "pixelwise_mean";
  case BatchMode::both: return "both";
  }
  return "unknown";
}

std::string to_string(AverageOrder order) {
  return order == AverageOrder::before_log ? "before_log" : "after_log";
}

SummaryStats summary_stats(std::span<const double> values) {
  if (values.empty()) throw UsageError("summary_stats of an empty list");
  std::vector<double> v(values.begin(), values.end());
  std::sort(v.begin(), v.end());

  SummaryStats s;
  s.n = v.size();
  const double n = static_cast<double>(v.size());
  s.min = v.front();
  s.max = v.back();
  if (s.min == s.max) {
    // Exact for constant lists, where the summed mean can be off by an ulp.
    s.mean = s.min;
  } else {
    s.mean = std::accumulate(v.begin(), v.end(), 0.0) / n;
    double sq = 0.0;
    for (double x : v) sq += (x - s.mean) * (x - s.mean);
    s.stddev = std::sqrt(sq / n);
  }
  if (v.size() >= 3) {
    const std::size_t half = (v.size() + 1) / 2;
    const std::span<const double> all(v);
    s.median = median_of_sorted(all);
    s.q1 = median_of_sorted(all.first(half));
    s.q3 = median_of_sorted(all.last(half));
  }
  return s;
}

nlohmann::ordered_json SummaryStats::to_json() const {
  nlohmann::ordered_json j;
  j["mean"] = mean;
  j["stddev"] = stddev;
  j["min"] = min;
  if (q1) j["q1"] = *q1;
  if (median) j["median"] = *median;
  if (q3) j["q3"] = *q3;
  j["max"] = max;
  return j;
}

SummaryStats SummaryStats::from_json(const nlohmann::json& j) {
  SummaryStats s;
  s.mean = j.at("mean").get<double>();
  s.stddev = j.at("stddev").get<double>();
  s.min = j.at("min").get<double>();
  s.max = j.at("max").get<double>();
  if (j.contains("q1")) s.q1 = j.at("q1").get<double>();
  if (j.contains("median")) s.median = j.at("median").get<double>();
  if (j.contains("q3")) s.q3 = j.at("q3").get<double>();
  return s;
}

nlohmann::ordered_json CliReport::to_json() const {
  nlohmann::ordered_json j;
  j["n_images"] = n_images;
  j["band_rho_per_um"] = {band.rho_lo, band.rho_hi};
  j["window"] = {{"kind", to_string(window.kind)},
                 {"energy_compensation", window.energy_compensation}};
  nlohmann::ordered_json t;
  t["mode"] = to_string(transform.mode);
  t["g0"] = transform.incident_intensity ? nlohmann::ordered_json(*transform.incident_intensity)
                                         : nlohmann::ordered_json(nullptr);
  t["zero_policy"] = to_string(transform.zero_policy);
  t["average_order"] = to_string(average_order);
  t["batch_mode"] = to_string(mode);
  j["transform"] = t;
  j["per_image"] = nlohmann::ordered_json::array();
  for (const auto& p : per_image_cli) j["per_image"].push_back({{"id", p.id}, {"cli", p.cli}});
  j["aggregate_cli"] = aggregate_cli ? nlohmann::ordered_json(*aggregate_cli)
                                     : nlohmann::ordered_json(nullptr);
  if (stats) j["stats"] = stats->to_json();
  j["warnings"] = warnings;
  return j;
}

double image_cli(const ScalarField& gray, const TransformOptions& transform,
                 const WindowSpec& window, const FrequencyBand& band,
                 TransformDiagnostics* diagnostics) {
  const ScalarField weights = log_attenuation(gray, transform, diagnostics);
  const NormalizedWeight normalized = normalize_relative_weight(weights);
  return cloudiness_index(power_spectrum_2d(normalized.field, window), band);
}

CliReport analyze_set(std::vector<NamedImage> images, const AnalysisOptions& opts) {
  if (images.empty()) throw UsageError("no images to analyze");
  std::sort(images.begin(), images.end(),
            [](const NamedImage& a, const NamedImage& b) { return a.id < b.id; });
  for (std::size_t i = 1; i < images.size(); ++i) {
    if (images[i].id == images[i - 1].id) throw UsageError("duplicate image id " + images[i].id);
  }
  const ScalarField& first = images.front().image;
  for (const NamedImage& img : images) {
    if (!img.image.same_geometry(first))
      throw DataError("image " + img.id + ": shape or pixel size differs from image " +
                      images.front().id);
  }

  CliReport report;
  report.n_images = images.size();
  report.window = opts.window;
  report.transform = opts.transform;
  report.mode = opts.mode;
  report.average_order = opts.average_order;
  report.band = valid_band(opts.band, first.width(), first.height(), first.pixel_size());
  if (report.band.status != FrequencyBand::Status::valid)
    throw DataError(describe_band_problem(
        report.band, band_limits(first.width(), first.height(), first.pixel_size())));
  report.warnings = report.band.warnings;

  auto run_one = [&](const std::string& id, const ScalarField& gray, TransformDiagnostics* diag) {
    try {
      return image_cli(gray, opts.transform, opts.window, report.band, diag);
    } catch (const DataError& e) {
      rethrow_with_id(id, e);
    } catch (const UsageError& e) {
      rethrow_with_id(id, e);
    }
  };

  if (opts.mode != BatchMode::pixelwise_mean) {
    std::vector<double> cli(images.size());
    std::vector<TransformDiagnostics> diag(images.size());
    parallel_for(images.size(), [&](std::size_t i) {
      cli[i] = run_one(images[i].id, images[i].image, &diag[i]);
    });
    for (std::size_t i = 0; i < images.size(); ++i) {
      report.per_image_cli.push_back({images[i].id, cli[i]});
      for (const std::string& w : diag[i].warnings())
        report.warnings.push_back("image " + images[i].id + ": " + w);
    }
    report.stats = summary_stats(cli);
  }

  if (opts.mode != BatchMode::per_image) {
    std::vector<ScalarField> grays;
    grays.reserve(images.size());
    for (const NamedImage& img : images) grays.push_back(img.image);

    // Gray values averaged first.
    TransformDiagnostics mean_diag;
    const double before = run_one("pixelwise-mean", pixelwise_mean(grays), &mean_diag);

    // Weights averaged first.
    std::vector<ScalarField> weights(images.size(), first);
    parallel_for(images.size(), [&](std::size_t i) {
      try {
        weights[i] = log_attenuation(images[i].image, opts.transform);
      } catch (const DataError& e) {
        rethrow_with_id(images[i].id, e);
      }
    });
    double after;
    try {
      after = cloudiness_index(
          power_spectrum_2d(normalize_relative_weight(pixelwise_mean(weights)).field, opts.window),
          report.band);
    } catch (const DataError& e) {
      rethrow_with_id("pixelwise-mean", e);
    }

    report.aggregate_cli = opts.average_order == AverageOrder::before_log ? before : after;
    if (opts.average_order == AverageOrder::before_log) {
      for (const std::string& w : mean_diag.warnings())
        report.warnings.push_back("pixelwise-mean image: " + w);
    }
    if (std::abs(before - after) > 0.01) {
      std::ostringstream s;
      s << std::setprecision(6) << "averaging order matters: CLI " << before
        << " when gray values are averaged, " << after << " when weights are averaged";
      report.warnings.push_back(s.str());
    }
    if (!report.stats) report.stats = summary_stats(std::span<const double>(&*report.aggregate_cli, 1));
  }
  return report;
}

} // namespace cloudscope
