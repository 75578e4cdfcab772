#include <cloudscope/spectrum.hpp>
#include <cloudscope/fft.hpp>

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>

namespace cloudscope {
namespace {

constexpr double pi = std::numbers::pi;

Eigen::Index signed_bin(Eigen::Index index, Eigen::Index n) { return index <= n / 2 ? index : index - n; }

double signed_frequency(Eigen::Index index, Eigen::Index n, double df) {
  return static_cast<double>(signed_bin(index, n)) * df;
}

double sinc(double z) { return z == 0.0 ? 1.0 : std::sin(z) / z; }

std::string fmt(double v, int digits = 6) {
  std::ostringstream s;
  s << std::setprecision(digits) << v;
  return s.str();
}

} // namespace

std::string to_string(WindowSpec::Kind kind) {
  return kind == WindowSpec::Kind::hann ? "hann" : "none";
}

std::string to_string(FrequencyBand::Status status) {
  switch (status) {
  case FrequencyBand::Status::valid: return "valid";
  case FrequencyBand::Status::below_low_limit: return "below_low_limit";
  case FrequencyBand::Status::above_nyquist: return "above_nyquist";
  case FrequencyBand::Status::inverted: return "inverted";
  }
  return "unknown";
}

Eigen::ArrayXd hann_window(Eigen::Index n) {
  if (n < 2) return Eigen::ArrayXd::Ones(n);
  const Eigen::ArrayXd i = Eigen::ArrayXd::LinSpaced(n, 0.0, static_cast<double>(n - 1));
  return 0.5 * (1.0 - (2.0 * pi * i / static_cast<double>(n - 1)).cos());
}

ScalarField apply_window(const ScalarField& field, const WindowSpec& window) {
  if (window.kind == WindowSpec::Kind::none) return field;

  const Eigen::ArrayXd hx = hann_window(field.width());
  const Eigen::ArrayXd hy = hann_window(field.height());
  Grid<double> taper = (hy.matrix() * hx.matrix().transpose()).array();
  if (window.energy_compensation) {
    const double rms = std::sqrt(taper.square().mean());
    taper /= rms;
  }
  return field.with_values(field.values() * taper, FieldKind::weight_field);
}

double PowerSpectrum2D::frequency_x(Eigen::Index col) const {
  return signed_frequency(col, width, df_x);
}

double PowerSpectrum2D::frequency_y(Eigen::Index row) const {
  return signed_frequency(row, height, df_y);
}

double PowerSpectrum2D::rho(Eigen::Index row, Eigen::Index col) const {
  return angular_frequency(std::hypot(frequency_x(col), frequency_y(row)));
}

PowerSpectrum2D power_spectrum_2d(const ScalarField& field, const WindowSpec& window) {
  const ScalarField tapered = apply_window(field, window);
  const double n = static_cast<double>(field.size());

  PowerSpectrum2D ps;
  ps.width = field.width();
  ps.height = field.height();
  ps.pixel_size = field.pixel_size();
  ps.df_x = 1.0 / (static_cast<double>(ps.width) * ps.pixel_size);
  ps.df_y = 1.0 / (static_cast<double>(ps.height) * ps.pixel_size);
  ps.energies = dft_squared_magnitude(tapered.values()) / (n * n);
  ps.dc_energy = ps.energies(0, 0);
  ps.energies(0, 0) = 0.0;
  ps.total_fluctuation_energy = ps.energies.sum();
  if (!(ps.total_fluctuation_energy > 0.0))
    throw DataError("zero fluctuation energy: cloudiness undefined");
  ps.energies /= ps.total_fluctuation_energy;
  ps.normalized = true;
  return ps;
}

RadialSpectrum radial_mean(const PowerSpectrum2D& ps) {
  RadialSpectrum rs;
  rs.delta_rho = angular_frequency(std::max(ps.df_x, ps.df_y));
  rs.bin_area = angular_frequency(ps.df_x) * angular_frequency(ps.df_y);

  // Radius in units of the annulus width, from signed bin indices, so that
  // bins lying exactly on an annulus edge (e.g. (3, 4) on a square grid) are
  // assigned without rounding noise.
  const double sx = ps.df_x / std::max(ps.df_x, ps.df_y);
  const double sy = ps.df_y / std::max(ps.df_x, ps.df_y);
  std::vector<double> sums;
  std::vector<Eigen::Index> counts;
  for (Eigen::Index r = 0; r < ps.height; ++r) {
    const double ky = sy * static_cast<double>(signed_bin(r, ps.height));
    for (Eigen::Index c = 0; c < ps.width; ++c) {
      if (r == 0 && c == 0) continue;
      const double kx = sx * static_cast<double>(signed_bin(c, ps.width));
      const auto annulus = static_cast<std::size_t>(std::floor(std::sqrt(kx * kx + ky * ky)));
      if (annulus >= sums.size()) {
        sums.resize(annulus + 1, 0.0);
        counts.resize(annulus + 1, 0);
      }
      sums[annulus] += ps.energies(r, c);
      ++counts[annulus];
    }
  }

  for (std::size_t i = 0; i < sums.size(); ++i) {
    if (counts[i] == 0) continue;
    RadialBin bin;
    bin.rho_center = (static_cast<double>(i) + 0.5) * rs.delta_rho;
    bin.count = counts[i];
    bin.mean_energy_density = sums[i] / (static_cast<double>(counts[i]) * rs.bin_area);
    bin.error_weight = error_weight(ps.width, ps.height, ps.pixel_size, bin.rho_center);
    rs.bins.push_back(bin);
  }
  return rs;
}

FrequencyBand FrequencyBand::from_wavelengths(double gamma_a, double gamma_b) {
  if (!(gamma_a > 0) || !(gamma_b > 0)) throw UsageError("wavelengths must be positive");
  return from_rho(rho_of_wavelength(std::max(gamma_a, gamma_b)),
                  rho_of_wavelength(std::min(gamma_a, gamma_b)));
}

BandLimits band_limits(Eigen::Index width, Eigen::Index height, double pixel_size) {
  BandLimits lim;
  const double w = static_cast<double>(width);
  const double h = static_cast<double>(height);
  lim.gamma_max = std::sqrt(w * w + h * h) * pixel_size / 2.0;
  lim.gamma_min = 2.0 * pixel_size;
  lim.rho_min = rho_of_wavelength(lim.gamma_max);
  lim.rho_max = rho_of_wavelength(lim.gamma_min);
  return lim;
}

FrequencyBand valid_band(const FrequencyBand& band, Eigen::Index width, Eigen::Index height,
                         double pixel_size) {
  if (width <= 0 || height <= 0 || !(pixel_size > 0))
    throw UsageError("valid_band: dimensions and pixel size must be positive");
  const BandLimits lim = band_limits(width, height, pixel_size);

  FrequencyBand out = band;
  out.warnings.clear();
  if (!(band.rho_lo < band.rho_hi))
    out.status = FrequencyBand::Status::inverted;
  else if (!(band.rho_lo > 0) || wavelength_of(band.rho_lo) > lim.gamma_max)
    out.status = FrequencyBand::Status::below_low_limit;
  else if (wavelength_of(band.rho_hi) < lim.gamma_min)
    out.status = FrequencyBand::Status::above_nyquist;
  else
    out.status = FrequencyBand::Status::valid;

  if (out.status == FrequencyBand::Status::valid) {
    if (wavelength_of(band.rho_lo) > lim.gamma_max / 4.0)
      out.warnings.push_back("band lower edge " + fmt(band.rho_lo) + " 1/um (wavelength " +
                             fmt(wavelength_of(band.rho_lo)) +
                             " um) exceeds a quarter of the half diagonal " + fmt(lim.gamma_max) +
                             " um: large statistical error expected");
    if (wavelength_of(band.rho_hi) < 4.0 * pixel_size)
      out.warnings.push_back("band upper edge " + fmt(band.rho_hi) + " 1/um (wavelength " +
                             fmt(wavelength_of(band.rho_hi)) +
                             " um) is shorter than four pixels (" + fmt(4.0 * pixel_size) +
                             " um)");
  }
  return out;
}

std::string describe_band_problem(const FrequencyBand& checked, const BandLimits& limits) {
  const std::string band = "[" + fmt(checked.rho_lo) + ", " + fmt(checked.rho_hi) + ") 1/um";
  switch (checked.status) {
  case FrequencyBand::Status::valid: return "band " + band + " is valid";
  case FrequencyBand::Status::inverted: return "band " + band + " is empty or inverted";
  case FrequencyBand::Status::below_low_limit:
    return "band " + band + " starts below the low-frequency limit " + fmt(limits.rho_min) +
           " 1/um (inverse half diagonal, wavelength " + fmt(limits.gamma_max) + " um)";
  case FrequencyBand::Status::above_nyquist:
    return "band " + band + " ends above the Nyquist-side limit " + fmt(limits.rho_max, 5) +
           " 1/um (wavelength " + fmt(limits.gamma_min) + " um = twice the pixel size)";
  }
  return "band " + band + ": unknown status";
}

double band_energy(const PowerSpectrum2D& ps, double rho_lo, double rho_hi) {
  double sum = 0.0;
  for (Eigen::Index r = 0; r < ps.height; ++r) {
    for (Eigen::Index c = 0; c < ps.width; ++c) {
      if (r == 0 && c == 0) continue;
      const double rho = ps.rho(r, c);
      if (rho >= rho_lo && rho < rho_hi) sum += ps.energies(r, c);
    }
  }
  return sum;
}

double cloudiness_index(const PowerSpectrum2D& ps, const FrequencyBand& band) {
  if (!ps.normalized) throw UsageError("cloudiness_index needs a normalized spectrum");
  const FrequencyBand checked = valid_band(band, ps.width, ps.height, ps.pixel_size);
  if (checked.status != FrequencyBand::Status::valid)
    throw DataError(describe_band_problem(checked, band_limits(ps.width, ps.height, ps.pixel_size)));
  return std::clamp(band_energy(ps, checked.rho_lo, checked.rho_hi), 0.0, 1.0);
}

double window_integral_variance(const PowerSpectrum2D& ps, double window_side) {
  const double extent =
      static_cast<double>(std::min(ps.width, ps.height)) * ps.pixel_size;
  if (!(window_side > 0) || window_side > extent * (1.0 + 1e-12))
    throw UsageError("window side must be in (0, " + fmt(extent) + "] um");

  const double a = window_side;
  const double p = ps.pixel_size;
  auto kernel = [&](double f) {
    if (a <= p) return 1.0;
    const double k = sinc(pi * f * a) / sinc(pi * f * p);
    return k * k;
  };

  Eigen::ArrayXd kx(ps.width), ky(ps.height);
  for (Eigen::Index c = 0; c < ps.width; ++c) kx(c) = kernel(ps.frequency_x(c));
  for (Eigen::Index r = 0; r < ps.height; ++r) ky(r) = kernel(ps.frequency_y(r));
  const Grid<double> k2 = (ky.matrix() * kx.matrix().transpose()).array();
  // energies(0, 0) is zero, so DC drops out.
  return (ps.energies * k2).sum();
}

double error_weight(Eigen::Index width, Eigen::Index height, double pixel_size, double rho) {
  const double w = static_cast<double>(width) * pixel_size;
  const double h = static_cast<double>(height) * pixel_size;
  if (!(rho > 0)) return 0.0;
  const double gamma = wavelength_of(rho);
  if (gamma >= std::hypot(w, h)) return 0.0;

  constexpr int samples = 4096;
  double sum = 0.0;
  for (int i = 0; i < samples; ++i) {
    const double theta = pi * (i + 0.5) / samples;
    sum += std::max(0.0, w - gamma * std::abs(std::cos(theta))) *
           std::max(0.0, h - gamma * std::abs(std::sin(theta)));
  }
  return sum / samples / (w * h);
}

} // namespace cloudscope
