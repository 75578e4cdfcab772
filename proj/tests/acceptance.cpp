// Acceptance suite: one PASS/FAIL line per criterion. Exit status is the
// number of failed criteria (0 when all pass).

#include <cloudscope/cli.hpp>
#include <cloudscope/grf_sim.hpp>
#include <cloudscope/parallel.hpp>
#include <cloudscope/spectrum.hpp>
#include <cloudscope/weight_transform.hpp>

#include "oracles.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <unistd.h>
#include <vector>

using namespace cloudscope;
namespace fs = std::filesystem;
using std::numbers::pi;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string format(const char* fmt, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, fmt, args...);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

ScalarField normalized(const Grid<double>& g, double p) {
  return normalize_relative_weight(ScalarField(g, p, FieldKind::weight_field)).field;
}

// Independent Hann taper with RMS compensation.
Grid<double> oracle_hann(const Grid<double>& g) {
  const auto rows = g.rows(), cols = g.cols();
  Grid<double> w(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c)
      w(r, c) = 0.25 * (1 - std::cos(2 * pi * static_cast<double>(r) / static_cast<double>(rows - 1))) *
                (1 - std::cos(2 * pi * static_cast<double>(c) / static_cast<double>(cols - 1)));
  double ms = 0.0;
  for (Eigen::Index i = 0; i < w.size(); ++i) ms += w.data()[i] * w.data()[i];
  const double rms = std::sqrt(ms / static_cast<double>(w.size()));
  return g * w / rms;
}

Grid<double> cosine_x(Eigen::Index rows, Eigen::Index cols, int k) {
  Grid<double> g(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c)
      g(r, c) = std::cos(2 * pi * k * static_cast<double>(c) / static_cast<double>(cols));
  return g;
}

// ---------------------------------------------------------------------------

Outcome parseval_suite() {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<int> size(8, 256);
  double worst_parseval = 0.0, worst_full = 0.0;
  int square = 0;
  for (int i = 0; i < 200; ++i) {
    const int rows = size(rng);
    const int cols = i % 4 == 0 ? rows : size(rng);
    square += rows == cols;
    const ScalarField f = normalized(oracle::white_noise(rows, cols, 7000 + static_cast<std::uint64_t>(i)), 7.0);
    const PowerSpectrum2D ps = power_spectrum_2d(f, {});
    const double var = oracle::variance(oracle_hann(f.values()));
    worst_parseval = std::max(worst_parseval, std::abs(ps.total_fluctuation_energy - var) / var);
    worst_full = std::max(worst_full, std::abs(band_energy(ps, 0.0, INFINITY) - 1.0));
  }
  const double t = seconds_since(t0);
  return {worst_parseval <= 1e-9 && worst_full <= 1e-12 && t < 30.0 && square > 0,
          format("200 fields (%d square), max Parseval rel. error %.2e (<= 1e-9), max |full-band CLI - 1| %.2e "
                 "(<= 1e-12), %.1f s (< 30 s)",
                 square, worst_parseval, worst_full, t)};
}

Outcome single_tone() {
  bool pass = true;
  std::ostringstream s;
  for (auto [rows, cols] : {std::pair{64, 64}, std::pair{48, 80}}) {
    const double p = 7.0;
    const ScalarField f = normalized(cosine_x(rows, cols, 1), p);
    const PowerSpectrum2D plain = power_spectrum_2d(f, {WindowSpec::Kind::none, true});
    const PowerSpectrum2D hann = power_spectrum_2d(f, {});
    const double two_plain = plain.energies(0, 1) + plain.energies(0, cols - 1);
    const double two_hann = hann.energies(0, 1) + hann.energies(0, cols - 1);
    const double rho0 = 2 * pi / (cols * p);
    // rho0 lies below the valid low limit of any image, so the band sums are raw.
    const double in_band = band_energy(plain, 0.5 * rho0, 1.5 * rho0);
    const double out_band = band_energy(plain, 2.0 * rho0, 10.0 * rho0);
    const bool ok = std::abs(two_plain - 1.0) <= 1e-12 && std::abs(plain.energies(0, 1) - 0.5) <= 1e-12 &&
                    two_hann >= 0.999 && in_band >= 0.999 && out_band <= 1e-3;
    pass = pass && ok;
    s << format("%dx%d: two bins %.15f without window, %.4f with Hann (>= 0.999); band CLI %.6f / %.2e; ", rows,
                cols, two_plain, two_hann, in_band, out_band);
  }
  // A tone inside the valid range, through the validated CLI.
  const ScalarField f = normalized(cosine_x(64, 64, 8), 7.0);
  const PowerSpectrum2D ps = power_spectrum_2d(f, {WindowSpec::Kind::none, true});
  const double rho = 2 * pi * 8 / (64 * 7.0);
  const double in = cloudiness_index(ps, FrequencyBand::from_rho(0.9 * rho, 1.1 * rho));
  const double out = cloudiness_index(ps, FrequencyBand::from_rho(1.2 * rho, 2.0 * rho));
  pass = pass && in >= 0.999 && out <= 1e-3;
  s << format("k=8 validated CLI %.6f / %.2e", in, out);
  return {pass, s.str()};
}

Outcome white_noise_flatness() {
  const int n = 256;
  const double p = 7.0;
  std::vector<double> cli(50);
  parallel_for(cli.size(), [&](std::size_t i) {
    const ScalarField f = normalized(oracle::white_noise(n, n, 300 + i), p);
    cli[i] = cloudiness_index(power_spectrum_2d(f, {}), FrequencyBand::from_rho(0.02, 0.10));
  });
  const oracle::MeanSe ms = oracle::mean_se(cli);
  const double expected = oracle::annulus_fraction(n, n, p, 0.02, 0.10);
  return {std::abs(ms.mean - expected) <= 3 * ms.se,
          format("mean CLI %.6f, bin fraction %.6f, |diff| %.2e <= 3 SE %.2e", ms.mean, expected,
                 std::abs(ms.mean - expected), 3 * ms.se)};
}

struct SimTable {
  std::vector<std::vector<double>> wide;   // [preset][seed]
  std::vector<std::vector<double>> narrow;
  double seconds = 0.0;
};

const SimTable& sim_table() {
  static const SimTable table = [] {
    const auto t0 = std::chrono::steady_clock::now();
    SimTable t;
    const int seeds = 20;
    t.wide.assign(4, std::vector<double>(seeds));
    t.narrow.assign(4, std::vector<double>(seeds));
    parallel_for(4 * seeds, [&](std::size_t job) {
      const std::size_t preset = job / seeds, seed = job % seeds;
      const SimPreset sp = sim_preset("sim" + std::to_string(preset + 1));
      const ScalarField f = simulate_preset(sp, 1 + seed);
      const PowerSpectrum2D ps = power_spectrum_2d(normalize_relative_weight(f).field, {});
      t.wide[preset][seed] = cloudiness_index(ps, FrequencyBand::from_rho(0.002, 0.010));
      t.narrow[preset][seed] = cloudiness_index(ps, FrequencyBand::from_rho(0.002, 0.006));
    });
    t.seconds = seconds_since(t0);
    return t;
  }();
  return table;
}

// a > b with a gap of more than two standard errors of the difference.
bool clearly_above(const oracle::MeanSe& a, const oracle::MeanSe& b) {
  return a.mean - b.mean > 2.0 * std::hypot(a.se, b.se);
}

std::string describe(const std::vector<oracle::MeanSe>& m) {
  std::string s;
  for (std::size_t i = 0; i < m.size(); ++i)
    s += format("SIM-%zu %.2f%% (SE %.2f)%s", i + 1, 100 * m[i].mean, 100 * m[i].se, i + 1 < m.size() ? ", " : "");
  return s;
}

Outcome sim_wide_band() {
  const SimTable& t = sim_table();
  std::vector<oracle::MeanSe> m;
  for (const auto& v : t.wide) m.push_back(oracle::mean_se(v));
  const bool order = clearly_above(m[1], m[2]) && clearly_above(m[2], m[3]) && clearly_above(m[3], m[0]);
  const bool brackets = m[0].mean < 0.20 && m[1].mean > 0.30;
  return {order && brackets && t.seconds < 600.0,
          describe(m) + format("; order 2>3>4>1 with 2 SE gaps: %s; SIM-1 < 20%%: %s; SIM-2 > 30%%: %s; %.0f s",
                               order ? "yes" : "no", m[0].mean < 0.20 ? "yes" : "no", m[1].mean > 0.30 ? "yes" : "no",
                               t.seconds)};
}

Outcome sim_narrow_band() {
  const SimTable& t = sim_table();
  std::vector<oracle::MeanSe> m;
  for (const auto& v : t.narrow) m.push_back(oracle::mean_se(v));
  const bool order = clearly_above(m[2], m[3]) && clearly_above(m[3], m[1]);
  return {order, describe(m) + format("; order 3>4>2 with 2 SE gaps: %s", order ? "yes" : "no")};
}

Outcome band_limit_validation() {
  const BandLimits lim = band_limits(2048, 1500, 7.2);
  const FrequencyBand b = valid_band(FrequencyBand::from_rho(0.02, 0.10), 2048, 1500, 7.2);
  const bool nyquist = std::abs(lim.rho_max - 0.436332) < 5e-7;
  const bool valid = b.status == FrequencyBand::Status::valid;
  const bool echo = std::abs(b.wavelength_lo() - 62.83) < 0.005 && std::abs(b.wavelength_hi() - 314.16) < 0.005;
  return {nyquist && valid && echo,
          format("Nyquist-side bound %.6f 1/um, band %s, wavelengths %.2f-%.2f um", lim.rho_max,
                 to_string(b.status).c_str(), b.wavelength_lo(), b.wavelength_hi())};
}

Outcome window_integral() {
  double worst = 0.0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const ScalarField f = normalized(oracle::white_noise(64, 64, 900 + seed), 1.0);
    const PowerSpectrum2D ps = power_spectrum_2d(f, {WindowSpec::Kind::none, true});
    for (int side : {2, 4, 8, 16}) {
      const double want = oracle::cyclic_box_mean_variance(f.values(), side);
      worst = std::max(worst, std::abs(window_integral_variance(ps, side) - want) / want);
    }
  }
  return {worst <= 0.02, format("max relative error %.2e over 20 fields x sides {2,4,8,16} (<= 2%%)", worst)};
}

Outcome interchange() {
  const auto t0 = std::chrono::steady_clock::now();
  const int reps = 30, per_rep = 10;
  const SimPreset sp = sim_preset("sim2");
  std::vector<std::vector<double>> diff(static_cast<std::size_t>(reps));
  std::vector<double> centers;
  parallel_for(static_cast<std::size_t>(reps), [&](std::size_t rep) {
    std::vector<ScalarField> fields;
    std::vector<double> mean_of_spectra;
    for (int i = 0; i < per_rep; ++i) {
      const ScalarField f = simulate_preset(sp, 100000 + rep * per_rep + static_cast<std::size_t>(i));
      const RadialSpectrum rs = radial_mean(power_spectrum_2d(normalize_relative_weight(f).field, {}));
      if (mean_of_spectra.empty()) mean_of_spectra.assign(rs.bins.size(), 0.0);
      for (std::size_t k = 0; k < rs.bins.size(); ++k) mean_of_spectra[k] += rs.bins[k].mean_energy_density / per_rep;
      fields.push_back(f);
    }
    const ScalarField avg = pixelwise_mean(fields);
    const RadialSpectrum rs = radial_mean(power_spectrum_2d(normalize_relative_weight(avg).field, {}));
    for (std::size_t k = 0; k < rs.bins.size(); ++k)
      diff[rep].push_back(rs.bins[k].mean_energy_density - mean_of_spectra[k]);
    if (rep == 0)
      for (const RadialBin& b : rs.bins) centers.push_back(b.rho_center);
  });
  const BandLimits lim = band_limits(sp.width, sp.height, sp.pixel_size);
  int tested = 0, agree = 0;
  for (std::size_t k = 0; k < centers.size(); ++k) {
    if (centers[k] < lim.rho_min || centers[k] >= lim.rho_max) continue;
    std::vector<double> d;
    for (const auto& rep : diff) d.push_back(rep[k]);
    const oracle::MeanSe ms = oracle::mean_se(d);
    ++tested;
    agree += std::abs(ms.mean) <= 3 * ms.se;
  }
  const double frac = static_cast<double>(agree) / tested;
  return {frac >= 0.95,
          format("%d of %d annuli in the valid band agree within 3 SE (%.1f%%, >= 95%%), %.0f s", agree, tested,
                 100 * frac, seconds_since(t0))};
}

Outcome bessel_autocorrelation() {
  // 875 um wavelength on a 8.75 um grid: r = 437.5 um is a 50 pixel lag.
  std::vector<double> acf(20);
  parallel_for(acf.size(), [&](std::size_t seed) {
    const ScalarField f = simulate_bessel_grf({875.0, 4096, 500 + seed}, 512, 512, 8.75);
    acf[seed] = oracle::autocorrelation(f.values(), 50);
  });
  const double mean = oracle::mean_se(acf).mean;
  const double j0 = std::cyl_bessel_j(0.0, pi);
  return {std::abs(mean - j0) <= 0.05,
          format("mean autocorrelation at 437.5 um %.4f, J0(pi) = %.4f, |diff| %.4f (<= 0.05)", mean, j0,
                 std::abs(mean - j0))};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

Outcome determinism() {
  const fs::path dir = fs::temp_directory_path() / ("cloudscope_acceptance_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  std::ostringstream out, err;
  auto run = [&](std::vector<std::string> args) { return cli::run(args, out, err); };
  const std::string a = (dir / "a.png").string(), b = (dir / "b.png").string();
  int codes = run({"simulate", "--preset", "sim3", "--seed", "42", "--out", a});
  codes += run({"simulate", "--preset", "sim3", "--seed", "42", "--out", b});
  const bool images = slurp(a) == slurp(b) && !slurp(a).empty();
  codes += run({"analyze", "--pixel-size", "7", a, "--out", (dir / "1.json").string()});
  codes += run({"analyze", "--pixel-size", "7", a, "--out", (dir / "2.json").string()});
  const bool reports = slurp(dir / "1.json") == slurp(dir / "2.json") && !slurp(dir / "1.json").empty();
  fs::remove_all(dir);
  return {codes == 0 && images && reports,
          format("exit codes %s, images byte-identical: %s, reports byte-identical: %s", codes == 0 ? "0" : "nonzero",
                 images ? "yes" : "no", reports ? "yes" : "no")};
}

Outcome round_trip() {
  double worst = 0.0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Grid<double> g = oracle::white_noise(96, 80, 40 + seed) * 1.5 + 3.0;
    const ScalarField img = to_transmission_image(ScalarField(g, 7.0, FieldKind::simulated), 60000.0, 0.7);
    const ScalarField back = normalize_relative_weight(log_attenuation(img, {})).field;
    const Grid<double> expected = (g - oracle::mean(g)) / std::sqrt(oracle::variance(g));
    worst = std::max(worst, (back.values() - expected).abs().maxCoeff());
  }
  return {worst <= 1e-9, format("max deviation %.2e over 20 fields (<= 1e-9)", worst)};
}

} // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"parseval and normalization", parseval_suite},
      {"single-tone oracle", single_tone},
      {"white-noise flatness", white_noise_flatness},
      {"SIM ordering, band 0.002-0.010", sim_wide_band},
      {"SIM ordering, band 0.002-0.006", sim_narrow_band},
      {"band-limit validation", band_limit_validation},
      {"window-integral variance", window_integral},
      {"mean/spectrum interchange", interchange},
      {"Bessel autocorrelation", bessel_autocorrelation},
      {"determinism", determinism},
      {"pipeline round trip", round_trip},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::printf("criterion %2zu %-32s %s  %s\n", i + 1, criteria[i].first, o.pass ? "PASS" : "FAIL", o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%zu criteria, %d failed\n", criteria.size(), failed);
  return failed;
}
