#pragma once

#include <cloudscope/field.hpp>

#include <numbers>
#include <string>
#include <vector>

namespace cloudscope {

// Public frequencies are angular, rho = 2*pi*f in 1/µm, so that a wavelength is
// gamma = 2*pi/rho. FFT bins are ordinary frequencies; the conversion happens
// only in angular_frequency().

constexpr double angular_frequency(double ordinary) { return 2.0 * std::numbers::pi * ordinary; }
constexpr double wavelength_of(double rho) { return 2.0 * std::numbers::pi / rho; }
constexpr double rho_of_wavelength(double gamma) { return 2.0 * std::numbers::pi / gamma; }

struct WindowSpec {
  enum class Kind { none, hann };
  Kind kind = Kind::hann;
  /// Divide the tapered field by the RMS of the 2D window.
  bool energy_compensation = true;
};

std::string to_string(WindowSpec::Kind kind);

/// Symmetric Hann taper h(i) = 0.5 (1 - cos(2 pi i / (n - 1))).
Eigen::ArrayXd hann_window(Eigen::Index n);

/// Tapers a field with the separable window. The result is tagged weight_field
/// since it no longer has unit variance; `none` returns the field unchanged.
ScalarField apply_window(const ScalarField& field, const WindowSpec& window);

/// Periodogram of a (normalized) weight field. Energies are |DFT|^2 / (Nx Ny)^2,
/// so before normalization the bins sum to the mean square of the windowed
/// field and the non-DC bins to its population variance. The DC bin is moved to
/// `dc_energy` and zeroed; the remaining bins are divided by their sum.
struct PowerSpectrum2D {
  Eigen::Index width = 0;
  Eigen::Index height = 0;
  double pixel_size = 0.0;
  double df_x = 0.0; ///< ordinary-frequency step along x, 1/µm
  double df_y = 0.0;
  Grid<double> energies;
  double dc_energy = 0.0;
  double total_fluctuation_energy = 0.0;
  bool normalized = false;

  /// Signed ordinary frequency of a column (x) or row (y) index.
  double frequency_x(Eigen::Index col) const;
  double frequency_y(Eigen::Index row) const;
  /// Angular radial frequency of a bin.
  double rho(Eigen::Index row, Eigen::Index col) const;
};

PowerSpectrum2D power_spectrum_2d(const ScalarField& field, const WindowSpec& window);

struct RadialBin {
  double rho_center = 0.0;          ///< 1/µm, angular
  double mean_energy_density = 0.0; ///< µm^2
  Eigen::Index count = 0;
  double error_weight = 0.0;
};

/// Rotation mean of a normalized spectrum. Annulus i holds the bins with
/// i*delta_rho <= rho < (i+1)*delta_rho. The density is the mean bin energy per
/// unit angular-frequency area, i.e. divided by bin_area = (2 pi)^2 df_x df_y,
/// so that sum(density * count * bin_area) == 1.
struct RadialSpectrum {
  std::vector<RadialBin> bins;
  double delta_rho = 0.0;
  double bin_area = 0.0;
};

RadialSpectrum radial_mean(const PowerSpectrum2D& ps);

struct FrequencyBand {
  enum class Status { valid, below_low_limit, above_nyquist, inverted };

  double rho_lo = 0.0;
  double rho_hi = 0.0;
  Status status = Status::valid;
  /// Soft warnings from the last validation (set by valid_band).
  std::vector<std::string> warnings;

  static FrequencyBand from_rho(double lo, double hi) { return {lo, hi, Status::valid, {}}; }
  /// Band from a wavelength range in µm; the longer wavelength gives rho_lo.
  static FrequencyBand from_wavelengths(double gamma_a, double gamma_b);

  double wavelength_lo() const { return wavelength_of(rho_hi); }
  double wavelength_hi() const { return wavelength_of(rho_lo); }
};

std::string to_string(FrequencyBand::Status status);

/// Geometry-imposed limits: the longest usable wavelength is the half diagonal
/// of the image, the shortest is twice the pixel size.
struct BandLimits {
  double gamma_max = 0.0; ///< µm
  double gamma_min = 0.0; ///< µm
  double rho_min = 0.0;   ///< 2 pi / gamma_max
  double rho_max = 0.0;   ///< 2 pi / gamma_min, the Nyquist-side limit
};

BandLimits band_limits(Eigen::Index width, Eigen::Index height, double pixel_size);

/// Sets `status` and `warnings` of a copy of `band` for the given geometry.
FrequencyBand valid_band(const FrequencyBand& band, Eigen::Index width, Eigen::Index height,
                         double pixel_size);

/// One-line explanation of a non-valid status, naming the violated limit.
std::string describe_band_problem(const FrequencyBand& checked, const BandLimits& limits);

/// Sum of normalized bin energies with rho_lo <= rho < rho_hi. No geometry
/// checks; [0, inf) gives the full non-DC energy.
double band_energy(const PowerSpectrum2D& ps, double rho_lo, double rho_hi);

/// Cloudiness index: the fraction of fluctuation energy in a band that is
/// valid for the spectrum's geometry. Throws DataError otherwise.
double cloudiness_index(const PowerSpectrum2D& ps, const FrequencyBand& band);

/// Variance of the mean of the normalized field over a randomly placed
/// axis-aligned square of side `window_side` µm:
///   sum over non-DC bins of E(f) K(f_x) K(f_y),
///   K(f) = [sinc(pi f a) / sinc(pi f p)]^2   for a >= p,  K = 1 for a < p,
/// where p is the pixel size. The denominator accounts for the fact that the
/// field is known only as pixel samples; for a an integer number of pixels the
/// value equals the variance of the discrete box mean over all cyclic positions.
double window_integral_variance(const PowerSpectrum2D& ps, double window_side);

/// Relative precision weight A(gamma)/A(0) of a spectral estimate at angular
/// frequency rho, where A(gamma) is the field-of-view area eroded by a segment
/// of length gamma = 2 pi / rho, averaged over orientations.
double error_weight(Eigen::Index width, Eigen::Index height, double pixel_size, double rho);

} // namespace cloudscope
