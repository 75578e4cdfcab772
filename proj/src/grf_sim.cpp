#include <cloudscope/grf_sim.hpp>
#include <cloudscope/stats.hpp>

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

namespace cloudscope {
namespace {

constexpr double pi = std::numbers::pi;

void check_geometry(Eigen::Index width, Eigen::Index height, double pixel_size) {
  if (width < 2 || height < 2) throw UsageError("simulation window must be at least 2x2 pixels");
  if (!(pixel_size > 0)) throw UsageError("pixel size must be positive");
}

} // namespace

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double SegmentModelParams::intensity_for_coverage(double coverage, double fiber_diameter,
                                                  double mean_length) {
  const double mean_area = mean_length * fiber_diameter + pi * fiber_diameter * fiber_diameter / 4.0;
  return coverage / mean_area;
}

void accumulate_segment(Grid<double>& counts, const Segment& segment, double pixel_size) {
  // Work in pixel units with pixel centers on integer coordinates.
  const Eigen::Vector2d a = segment.a / pixel_size - Eigen::Vector2d::Constant(0.5);
  const Eigen::Vector2d b = segment.b / pixel_size - Eigen::Vector2d::Constant(0.5);
  const double r = segment.radius / pixel_size;
  const double r2 = r * r;
  const Eigen::Vector2d d = b - a;
  const double len2 = d.squaredNorm();

  const auto rows = counts.rows();
  const auto cols = counts.cols();
  const Eigen::Index row_lo = std::max<Eigen::Index>(0, static_cast<Eigen::Index>(std::ceil(std::min(a.y(), b.y()) - r)));
  const Eigen::Index row_hi = std::min<Eigen::Index>(rows - 1, static_cast<Eigen::Index>(std::floor(std::max(a.y(), b.y()) + r)));

  for (Eigen::Index row = row_lo; row <= row_hi; ++row) {
    const double y = static_cast<double>(row);
    // Parameter range of segment points within r of this row, widened by r in x.
    double t0 = 0.0, t1 = 1.0;
    if (d.y() != 0.0) {
      double ta = (y - r - a.y()) / d.y();
      double tb = (y + r - a.y()) / d.y();
      if (ta > tb) std::swap(ta, tb);
      t0 = std::max(t0, ta);
      t1 = std::min(t1, tb);
      if (t0 > t1) continue;
    } else if (std::abs(a.y() - y) > r) {
      continue;
    }
    const double xa = a.x() + t0 * d.x();
    const double xb = a.x() + t1 * d.x();
    const Eigen::Index col_lo = std::max<Eigen::Index>(0, static_cast<Eigen::Index>(std::ceil(std::min(xa, xb) - r)));
    const Eigen::Index col_hi = std::min<Eigen::Index>(cols - 1, static_cast<Eigen::Index>(std::floor(std::max(xa, xb) + r)));

    for (Eigen::Index col = col_lo; col <= col_hi; ++col) {
      const Eigen::Vector2d q(static_cast<double>(col), y);
      const double t = len2 > 0.0 ? std::clamp((q - a).dot(d) / len2, 0.0, 1.0) : 0.0;
      if ((q - (a + t * d)).squaredNorm() <= r2) counts(row, col) += 1.0;
    }
  }
}

std::vector<Segment> sample_segments(const SegmentModelParams& params, Eigen::Index width,
                                     Eigen::Index height, double pixel_size) {
  check_geometry(width, height, pixel_size);
  if (!(params.fiber_diameter > 0) || !(params.mean_length > 0) || params.intensity < 0)
    throw UsageError("segment model parameters must be positive");

  const double margin = params.mean_length + params.fiber_diameter;
  const double x0 = -margin;
  const double y0 = -margin;
  const double ext_w = static_cast<double>(width) * pixel_size + 2.0 * margin;
  const double ext_h = static_cast<double>(height) * pixel_size + 2.0 * margin;

  std::mt19937_64 rng(params.seed);
  std::poisson_distribution<long> count_dist(params.intensity * ext_w * ext_h);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::exponential_distribution<double> length_dist(1.0 / params.mean_length);

  const long n = params.intensity > 0 ? count_dist(rng) : 0;
  std::vector<Segment> segments;
  segments.reserve(static_cast<std::size_t>(n));
  for (long i = 0; i < n; ++i) {
    const Eigen::Vector2d mid(x0 + unit(rng) * ext_w, y0 + unit(rng) * ext_h);
    const double theta = pi * unit(rng);
    const double half = 0.5 * length_dist(rng);
    const Eigen::Vector2d dir(std::cos(theta), std::sin(theta));
    segments.push_back({mid - half * dir, mid + half * dir, params.fiber_diameter / 2.0});
  }
  return segments;
}

ScalarField simulate_segment_field(const SegmentModelParams& params, Eigen::Index width,
                                   Eigen::Index height, double pixel_size) {
  Grid<double> counts = Grid<double>::Zero(height, width);
  for (const Segment& s : sample_segments(params, width, height, pixel_size))
    accumulate_segment(counts, s, pixel_size);
  return {std::move(counts), pixel_size, FieldKind::simulated};
}

ScalarField simulate_bessel_grf(const BesselGrfParams& params, Eigen::Index width,
                                Eigen::Index height, double pixel_size) {
  check_geometry(width, height, pixel_size);
  if (params.lambda < 0 || !std::isfinite(params.lambda))
    throw UsageError("GRF wavelength lambda must be nonnegative");
  if (params.lambda == 0.0)
    return {Grid<double>::Zero(height, width), pixel_size, FieldKind::simulated};
  if (params.n_waves < 1) throw UsageError("GRF needs at least one wave");

  const Eigen::Index n = params.n_waves;
  std::mt19937_64 rng(params.seed);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * pi);
  Eigen::ArrayXd kx(n), ky(n), phase(n);
  const double k = 2.0 * pi / params.lambda;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double theta = angle(rng);
    kx(i) = k * std::cos(theta);
    ky(i) = k * std::sin(theta);
    phase(i) = angle(rng);
  }

  const Eigen::ArrayXd x = (Eigen::ArrayXd::LinSpaced(width, 0.0, static_cast<double>(width - 1)) + 0.5) * pixel_size;
  const Eigen::ArrayXd y = (Eigen::ArrayXd::LinSpaced(height, 0.0, static_cast<double>(height - 1)) + 0.5) * pixel_size;

  // cos(kx x + ky y + phi) = cos(kx x + phi) cos(ky y) - sin(kx x + phi) sin(ky y),
  // so the sum over waves is one (H x 2n) * (2n x W) product.
  Eigen::MatrixXd left(height, 2 * n);
  Eigen::MatrixXd right(2 * n, width);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::ArrayXd ay = ky(i) * y;
    left.col(i) = ay.cos().matrix();
    left.col(n + i) = -ay.sin().matrix();
    const Eigen::ArrayXd ax = kx(i) * x + phase(i);
    right.row(i) = ax.cos().matrix().transpose();
    right.row(n + i) = ax.sin().matrix().transpose();
  }
  Grid<double> z = (std::sqrt(2.0 / static_cast<double>(n)) * (left * right)).array();
  return {std::move(z), pixel_size, FieldKind::simulated};
}

ScalarField superpose(const ScalarField& fiber, const ScalarField& grf,
                      const SuperpositionSpec& spec) {
  if (!fiber.same_geometry(grf)) throw DataError("superpose: fields differ in shape or pixel size");
  if (!(spec.fiber_weight > 0) || spec.grf_weight < 0)
    throw UsageError("superpose: fiber weight must be positive and GRF weight nonnegative");
  if (fiber.values().maxCoeff() == fiber.values().minCoeff())
    throw DataError("superpose: constant fiber field");

  Grid<double> mixed = spec.fiber_weight * standardized(fiber.values());
  const bool grf_constant = grf.values().maxCoeff() == grf.values().minCoeff();
  if (!grf_constant && spec.grf_weight > 0) mixed += spec.grf_weight * standardized(grf.values());
  mixed /= spec.fiber_weight + spec.grf_weight;
  return fiber.with_values(mixed, FieldKind::simulated);
}

ScalarField to_transmission_image(const ScalarField& field, double g0, double absorption) {
  if (!(g0 > 0) || !(absorption > 0)) throw UsageError("g0 and absorption must be positive");
  const double lo = field.values().minCoeff();
  const double range = field.values().maxCoeff() - lo;
  if (g0 * std::exp(-absorption * range) < 1.0)
    throw DataError("absorption too strong: darkest pixel would fall below gray level 1");
  return field.with_values(g0 * (-absorption * (field.values() - lo)).exp(), FieldKind::gray_image);
}

SimPreset sim_preset(std::string_view name) {
  SimPreset p;
  p.name = std::string(name);
  p.fibers.fiber_diameter = 42.0;
  p.fibers.mean_length = 896.0;
  p.fibers.intensity = SegmentModelParams::intensity_for_coverage(
      default_fiber_coverage, p.fibers.fiber_diameter, p.fibers.mean_length);
  if (name == "sim1") {
    p.grf.lambda = 0.0;
    p.mix = {1.0, 0.0};
  } else if (name == "sim2") {
    p.grf.lambda = 875.0;
    p.mix = {2.0, 1.0};
  } else if (name == "sim3") {
    p.grf.lambda = 1750.0;
    p.mix = {2.0, 1.0};
  } else if (name == "sim4") {
    p.grf.lambda = 1750.0;
    p.mix = {3.0, 1.0};
  } else {
    throw UsageError("unknown preset '" + std::string(name) + "' (expected sim1..sim4)");
  }
  return p;
}

ScalarField simulate_preset(const SimPreset& preset, std::uint64_t seed) {
  SegmentModelParams fibers = preset.fibers;
  fibers.seed = mix_seed(seed, 0);
  BesselGrfParams grf = preset.grf;
  grf.seed = mix_seed(seed, 1);
  const ScalarField fiber_field =
      simulate_segment_field(fibers, preset.width, preset.height, preset.pixel_size);
  const ScalarField grf_field =
      simulate_bessel_grf(grf, preset.width, preset.height, preset.pixel_size);
  return superpose(fiber_field, grf_field, preset.mix);
}

} // namespace cloudscope
