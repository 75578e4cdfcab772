#pragma once

#include <cloudscope/field.hpp>

#include <Eigen/Core>

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace cloudscope {

/// Fiber dilution model: Poisson germs, each the midpoint of a segment with
/// uniform orientation and exponential length, dilated by a disk. The field
/// value at a pixel counts the dilated segments covering its center.
struct SegmentModelParams {
  double fiber_diameter = 42.0; ///< µm
  double mean_length = 896.0;   ///< µm
  double intensity = 0.0;       ///< germs per µm^2
  std::uint64_t seed = 0;

  /// Intensity giving `coverage` overlapping fibers per pixel on average.
  static double intensity_for_coverage(double coverage, double fiber_diameter,
                                       double mean_length);
};

/// Segment between two points (µm) dilated by a disk of the given radius.
struct Segment {
  Eigen::Vector2d a;
  Eigen::Vector2d b;
  double radius = 0.0;
};

/// Adds 1 to every pixel whose center lies within `radius` of the segment.
/// Pixel (row, col) has its center at ((col + 0.5) p, (row + 0.5) p).
void accumulate_segment(Grid<double>& counts, const Segment& segment, double pixel_size);

/// Germs drawn on the image window enlarged by mean_length + fiber_diameter on
/// every side, so segments reaching in from outside are represented.
std::vector<Segment> sample_segments(const SegmentModelParams& params, Eigen::Index width,
                                     Eigen::Index height, double pixel_size);

ScalarField simulate_segment_field(const SegmentModelParams& params, Eigen::Index width,
                                   Eigen::Index height, double pixel_size);

/// Random-wave Gaussian random field with autocorrelation J0(2 pi r / lambda).
struct BesselGrfParams {
  double lambda = 0.0; ///< µm; 0 gives the constant zero field
  int n_waves = 256;
  std::uint64_t seed = 0;
};

/// Z(x) = sqrt(2/n) sum_i cos(2 pi <u_i, x> / lambda + phi_i) with uniform
/// directions u_i and phases phi_i.
ScalarField simulate_bessel_grf(const BesselGrfParams& params, Eigen::Index width,
                                Eigen::Index height, double pixel_size);

/// Mixing weights applied to the standardized fiber and GRF fields.
struct SuperpositionSpec {
  double fiber_weight = 1.0;
  double grf_weight = 0.0;
};

/// (wf * fiber* + wg * grf*) / (wf + wg), where * denotes standardization to
/// zero mean and unit variance. A constant GRF contributes nothing.
ScalarField superpose(const ScalarField& fiber, const ScalarField& grf,
                      const SuperpositionSpec& spec);

/// Beer-Lambert forward model g = g0 exp(-absorption (field - min field)).
ScalarField to_transmission_image(const ScalarField& field, double g0, double absorption);

/// Parameter set of one of the reference simulations sim1..sim4.
struct SimPreset {
  std::string name;
  Eigen::Index width = 1024;
  Eigen::Index height = 1024;
  double pixel_size = 7.0;
  SegmentModelParams fibers;
  BesselGrfParams grf;
  SuperpositionSpec mix;
};

/// Mean number of overlapping fibers per pixel used for the presets.
inline constexpr double default_fiber_coverage = 3.0;

SimPreset sim_preset(std::string_view name);

/// Runs a preset with the fiber and GRF seeds derived from `seed`.
ScalarField simulate_preset(const SimPreset& preset, std::uint64_t seed);

/// splitmix64 step; used to derive independent sub-seeds.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

} // namespace cloudscope
