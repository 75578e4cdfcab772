#include <cloudscope/batch.hpp>
#include <cloudscope/weight_transform.hpp>

#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

using namespace cloudscope;

namespace {

Grid<double> random_gray(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> d(1, 255);
  Grid<double> g(rows, cols);
  for (Eigen::Index i = 0; i < g.size(); ++i) g.data()[i] = d(rng);
  return g;
}

} // namespace

TEST_CASE("Beer-Lambert weights") {
  Grid<double> g(2, 2);
  g << 200, 100, 200, 100;
  TransformOptions opts;
  opts.incident_intensity = 200.0;
  const ScalarField w = log_attenuation(ScalarField(g, 1.0, FieldKind::gray_image), opts);
  CHECK(w.kind() == FieldKind::weight_field);
  CHECK(w(0, 0) == 0.0);
  CHECK(w(0, 1) == doctest::Approx(std::log(2.0)).epsilon(1e-15));
}

TEST_CASE("g0 defaults to the image maximum") {
  Grid<double> g(2, 2);
  g << 50, 100, 25, 100;
  TransformDiagnostics diag;
  const ScalarField w = log_attenuation(ScalarField(g, 1.0, FieldKind::gray_image), {}, &diag);
  CHECK(diag.g0 == 100.0);
  CHECK(w(0, 1) == 0.0);
  CHECK(w(1, 0) == doctest::Approx(std::log(4.0)));
}

TEST_CASE("pixels above g0 are flagged") {
  Grid<double> g(2, 2);
  g << 50, 100, 25, 120;
  TransformOptions opts;
  opts.incident_intensity = 100.0;
  TransformDiagnostics diag;
  const ScalarField w = log_attenuation(ScalarField(g, 1.0, FieldKind::gray_image), opts, &diag);
  CHECK(diag.above_g0_pixels == 1);
  CHECK(w(1, 1) < 0.0);
  CHECK_FALSE(diag.warnings().empty());
}

TEST_CASE("linear mode is the identity") {
  const Grid<double> g = random_gray(5, 7, 3);
  TransformOptions opts;
  opts.mode = TransformOptions::Mode::linear;
  const ScalarField w = log_attenuation(ScalarField(g, 2.0, FieldKind::gray_image), opts);
  CHECK(w.kind() == FieldKind::weight_field);
  CHECK((w.values() == g).all());
}

TEST_CASE("zero pixels") {
  Grid<double> g(4, 4);
  g << 10, 20, 30, 40,
       0, 3, 50, 60,
       70, 80, 90, 100,
       110, 120, 130, 140;
  const ScalarField image(g, 1.0, FieldKind::gray_image);
  SUBCASE("error policy") {
    CHECK_THROWS_AS(log_attenuation(image, {}), DataError);
  }
  SUBCASE("clamp to the smallest positive value") {
    TransformOptions opts;
    opts.zero_policy = TransformOptions::ZeroPolicy::clamp_to_min_positive;
    opts.incident_intensity = 255.0;
    TransformDiagnostics diag;
    const ScalarField w = log_attenuation(image, opts, &diag);
    CHECK(diag.clamped_pixels == 1);
    CHECK(diag.clamp_value == 3.0);
    for (Eigen::Index r = 0; r < 4; ++r)
      for (Eigen::Index c = 0; c < 4; ++c) {
        const double v = g(r, c) == 0 ? 3.0 : g(r, c);
        CHECK(w(r, c) == doctest::Approx(-std::log(v / 255.0)).epsilon(1e-15));
      }
  }
}

TEST_CASE("non-gray input is rejected") {
  const ScalarField f(Grid<double>::Ones(2, 2), 1.0, FieldKind::weight_field);
  CHECK_THROWS_AS(log_attenuation(f, {}), UsageError);
}

TEST_CASE("normalization of a two-valued field") {
  Grid<double> w(2, 2);
  w << 0, std::log(2.0), 0, std::log(2.0);
  const NormalizedWeight n = normalize_relative_weight(ScalarField(w, 1.0, FieldKind::weight_field));
  CHECK(n.field.kind() == FieldKind::normalized_weight);
  CHECK(n.mean == doctest::Approx(0.346574).epsilon(1e-6));
  CHECK(n.stddev == doctest::Approx(0.346574).epsilon(1e-6));
  CHECK(n.field(0, 0) == doctest::Approx(-1.0));
  CHECK(n.field(0, 1) == doctest::Approx(1.0));
}

TEST_CASE("constant field cannot be normalized") {
  const ScalarField f(Grid<double>::Constant(8, 8, 0.3), 1.0, FieldKind::weight_field);
  CHECK_THROWS_WITH_AS(normalize_relative_weight(f), "zero variance: cloudiness undefined", DataError);
}

TEST_CASE("normalized moments against a two-pass oracle") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    CAPTURE(seed);
    const Grid<double> g = oracle::white_noise(64, 64, seed) * 0.2 + 5.0;
    const NormalizedWeight n = normalize_relative_weight(ScalarField(g, 1.0, FieldKind::weight_field));
    CHECK(n.mean == doctest::Approx(oracle::mean(g)).epsilon(1e-12));
    CHECK(n.stddev == doctest::Approx(std::sqrt(oracle::variance(g))).epsilon(1e-12));
    CHECK(std::abs(oracle::mean(n.field.values())) < 1e-12);
    CHECK(std::abs(std::sqrt(oracle::variance(n.field.values())) - 1.0) < 1e-9);
  }
}

TEST_CASE("pixelwise_mean") {
  const ScalarField f(oracle::white_noise(16, 16, 1), 1.0, FieldKind::weight_field);
  SUBCASE("single field") {
    const std::vector<ScalarField> one{f};
    CHECK((pixelwise_mean(one).values() == f.values()).all());
  }
  SUBCASE("f and -f") {
    const std::vector<ScalarField> pair{f, f.with_values(-f.values(), FieldKind::weight_field)};
    CHECK((pixelwise_mean(pair).values() == 0.0).all());
  }
  SUBCASE("ten fields against a brute-force sum") {
    std::vector<ScalarField> fields;
    for (std::uint64_t s = 0; s < 10; ++s)
      fields.emplace_back(oracle::white_noise(16, 16, 100 + s), 1.0, FieldKind::weight_field);
    const ScalarField m = pixelwise_mean(fields);
    CHECK(m.kind() == FieldKind::weight_field);
    for (Eigen::Index r = 0; r < 16; ++r)
      for (Eigen::Index c = 0; c < 16; ++c) {
        double s = 0.0;
        for (const auto& x : fields) s += x(r, c);
        CHECK(std::abs(m(r, c) - s / 10.0) < 1e-12);
      }
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(pixelwise_mean(std::span<const ScalarField>{}), UsageError);
    const std::vector<ScalarField> shape{f, ScalarField(oracle::white_noise(16, 8, 2), 1.0, FieldKind::weight_field)};
    CHECK_THROWS_AS(pixelwise_mean(shape), DataError);
    const std::vector<ScalarField> pitch{f, ScalarField(f.values(), 2.0, FieldKind::weight_field)};
    CHECK_THROWS_AS(pixelwise_mean(pitch), DataError);
    const std::vector<ScalarField> kind{f, f.with_kind(FieldKind::simulated)};
    CHECK_THROWS_AS(pixelwise_mean(kind), DataError);
  }
}

TEST_CASE("log_attenuation is monotone decreasing") {
  Grid<double> g(1, 256);
  for (int i = 0; i < 256; ++i) g(0, i) = i + 1;
  Grid<double> g2(2, 256);
  g2 << g, g;
  TransformOptions opts;
  opts.incident_intensity = 300.0;
  const ScalarField w = log_attenuation(ScalarField(g2, 1.0, FieldKind::gray_image), opts);
  for (int i = 1; i < 256; ++i) CHECK(w(0, i) < w(0, i - 1));
}

TEST_CASE("scaling gray values and g0 together changes nothing") {
  const FrequencyBand band = FrequencyBand::from_rho(0.05, 0.4);
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    CAPTURE(seed);
    const Grid<double> g = random_gray(64, 64, seed);
    for (double c : {0.37, 2.0, 257.0}) {
      CAPTURE(c);
      TransformOptions a, b;
      a.incident_intensity = 300.0;
      b.incident_intensity = 300.0 * c;
      const ScalarField wa = log_attenuation(ScalarField(g, 7.0, FieldKind::gray_image), a);
      const ScalarField wb = log_attenuation(ScalarField(g * c, 7.0, FieldKind::gray_image), b);
      CHECK((wa.values() - wb.values()).abs().maxCoeff() < 1e-12);
      const double cli_a = image_cli(ScalarField(g, 7.0, FieldKind::gray_image), a, {}, band);
      const double cli_b = image_cli(ScalarField(g * c, 7.0, FieldKind::gray_image), b, {}, band);
      CHECK(std::abs(cli_a - cli_b) < 1e-12);
    }
  }
}
