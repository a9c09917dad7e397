#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>

#include "helpers.hpp"
#include "spdc/dispersion.hpp"

using namespace spdc;
using spdctest::data_path;
using spdctest::load_shared;

namespace {

std::string write_temp_json(const std::string& name, const std::string& body) {
  const std::string path = std::string("/tmp/spdc_test_") + name;
  std::ofstream out(path);
  out << body;
  return path;
}

constexpr double kTwoPiLocal = 6.283185307179586;

}  // namespace

TEST_CASE("ktp loads with y and z axes and full validity", "[dispersion]") {
  const CrystalDispersion c = load_crystal(data_path("ktp.crystal"));
  CHECK(c.name == "KTiOPO4");
  CHECK(c.axes.size() == 2);
  REQUIRE(c.has_axis("y"));
  REQUIRE(c.has_axis("z"));
  // n_y evaluable across the declared range
  CHECK_NOTHROW(refractive_index(c, "y", 400.0, 25.0));
  CHECK_NOTHROW(refractive_index(c, "y", 3500.0, 25.0));
  CHECK_NOTHROW(refractive_index(c, "y", 1459.4, 60.0));
  CHECK(c.metadata.d_coefficients.size() == 1);
  CHECK(c.metadata.d_coefficients[0].label == "d32");
  CHECK(c.metadata.d_coefficients[0].value_pm_per_v == 3.7);
}

TEST_CASE("loader rejects malformed files", "[dispersion]") {
  SECTION("inverted wavelength range") {
    const auto path = write_temp_json("inverted.crystal", R"({
      "schema_version": 1, "name": "Bad", "id": "bad",
      "temperature_validity_c": [10, 50], "axes": ["a"],
      "dispersion": {"a": {
        "sellmeier": {"form": "rational_two_pole",
          "coefficients": [3.24, 0, 0, 0, 0, 0], "reference_temperature_c": 25},
        "thermal": {"form": "none", "coefficients": []},
        "wavelength_validity_nm": [2000, 500]}}})");
    CHECK_THROWS_AS(load_crystal(path), ValidationError);
  }
  SECTION("axis listed without dispersion model") {
    const auto path = write_temp_json("missing_axis.crystal", R"({
      "schema_version": 1, "name": "Bad", "id": "bad",
      "temperature_validity_c": [10, 50], "axes": ["a", "q"],
      "dispersion": {"a": {
        "sellmeier": {"form": "rational_two_pole",
          "coefficients": [3.24, 0, 0, 0, 0, 0], "reference_temperature_c": 25},
        "thermal": {"form": "none", "coefficients": []},
        "wavelength_validity_nm": [500, 2000]}}})");
    CHECK_THROWS_AS(load_crystal(path), ValidationError);
  }
  SECTION("unknown form id") {
    const auto path = write_temp_json("badform.crystal", R"({
      "schema_version": 1, "name": "Bad", "id": "bad",
      "temperature_validity_c": [10, 50], "axes": ["a"],
      "dispersion": {"a": {
        "sellmeier": {"form": "cauchy",
          "coefficients": [3.24], "reference_temperature_c": 25},
        "thermal": {"form": "none", "coefficients": []},
        "wavelength_validity_nm": [500, 2000]}}})");
    CHECK_THROWS_AS(load_crystal(path), ValidationError);
  }
  SECTION("unknown schema version") {
    const auto path = write_temp_json("badver.crystal",
                                      R"({"schema_version": 99, "name": "x"})");
    CHECK_THROWS_AS(load_crystal(path), ParseError);
  }
  SECTION("unphysical index rejected at load") {
    const auto path = write_temp_json("hugeindex.crystal", R"({
      "schema_version": 1, "name": "Bad", "id": "bad",
      "temperature_validity_c": [10, 50], "axes": ["a"],
      "dispersion": {"a": {
        "sellmeier": {"form": "rational_two_pole",
          "coefficients": [30.0, 0, 0, 0, 0, 0], "reference_temperature_c": 25},
        "thermal": {"form": "none", "coefficients": []},
        "wavelength_validity_nm": [500, 2000]}}})");
    CHECK_THROWS_AS(load_crystal(path), ValidationError);
  }
  SECTION("missing file") {
    CHECK_THROWS_AS(load_crystal("/nonexistent/nope.crystal"), ParseError);
  }
}

TEST_CASE("ktp wavevectors at the operating point", "[dispersion]") {
  const CrystalDispersion c = load_crystal(data_path("ktp.crystal"));
  const double ns = refractive_index(c, "z", 562.0, 60.0);
  const double ni = refractive_index(c, "y", 1459.4, 60.0);
  const double ks = kTwoPiLocal * ns / 0.562;
  const double ki = kTwoPiLocal * ni / 1.4594;
  CHECK(ks == Catch::Approx(21.0).margin(0.1));
  CHECK(ki == Catch::Approx(7.5).margin(0.1));
  CHECK(ns == Catch::Approx(1.88).margin(0.01));
  CHECK(ni == Catch::Approx(1.74).margin(0.01));
}

TEST_CASE("thermal correction vanishes at the reference temperature",
          "[dispersion]") {
  for (const char* file :
       {"ktp.crystal", "rtp.crystal", "knbo3.crystal", "mgoln.crystal"}) {
    const CrystalDispersion c = load_crystal(data_path(file));
    std::mt19937 rng(42);
    for (const auto& axis : c.axes) {
      const AxisDispersion& ax = c.axis(axis);
      const double tref = ax.sellmeier.reference_temperature_c;
      std::uniform_real_distribution<double> lam(ax.lambda_min_nm,
                                                 ax.lambda_max_nm);
      for (int i = 0; i < 100; ++i) {
        const double l = lam(rng);
        const double n_full = refractive_index(c, axis, l, tref);
        const double n_sell = sellmeier_value(ax.sellmeier, l * 1e-3);
        CHECK(std::abs(n_full - n_sell) <= 1e-15 * n_sell);
      }
    }
  }
}

TEST_CASE("analytic derivatives match central finite differences",
          "[dispersion]") {
  for (const char* file : {"ktp.crystal", "mgoln.crystal"}) {
    const CrystalDispersion c = load_crystal(data_path(file));
    std::mt19937 rng(7);
    for (const auto& axis : c.axes) {
      const AxisDispersion& ax = c.axis(axis);
      std::uniform_real_distribution<double> lam(ax.lambda_min_nm + 1.0,
                                                 ax.lambda_max_nm - 1.0);
      std::uniform_real_distribution<double> temp(c.temperature_min_c + 1.0,
                                                  c.temperature_max_c - 1.0);
      for (int i = 0; i < 10; ++i) {
        const double l = lam(rng);
        const double t = temp(rng);
        const double fd_t = (refractive_index(c, axis, l, t + 0.1) -
                             refractive_index(c, axis, l, t - 0.1)) /
                            0.2;
        const double an_t = dn_dt(c, axis, l, t);
        CHECK(std::abs(an_t - fd_t) <=
              1e-6 * std::max(std::abs(fd_t), 1e-12));
        const double fd_l = (refractive_index(c, axis, l + 0.1, t) -
                             refractive_index(c, axis, l - 0.1, t)) /
                            0.2;
        const double an_l = dn_dlambda(c, axis, l, t);
        CHECK(std::abs(an_l - fd_l) <= 1e-6 * std::abs(fd_l));
      }
    }
  }
}

TEST_CASE("pump and signal thermo-optic rates nearly coincide for ktp ncpm",
          "[dispersion]") {
  const CrystalDispersion c = load_crystal(data_path("ktp.crystal"));
  const double dp = dn_dt(c, "y", 405.75, 60.0);
  const double ds = dn_dt(c, "z", 562.0, 60.0);
  const double di = dn_dt(c, "y", 1459.4, 60.0);
  CHECK(std::abs(dp / ds - 1.0) < 0.15);
  // per-degree wavevector contribution of each interacting wave
  for (const auto& [d, lam] : {std::pair{dp, 405.75}, {ds, 562.0},
                               {di, 1459.4}}) {
    const double dk = kTwoPiLocal * std::abs(d) / (lam * 1e-3);
    CHECK(dk > 1e-5);
    CHECK(dk < 5e-4);
  }
  // the compensation inequality behind the low temperature sensitivity
  CHECK(std::abs(ds - dp) < std::abs(di - dp));
}

TEST_CASE("group index", "[dispersion]") {
  const CrystalDispersion c = load_crystal(data_path("ktp.crystal"));
  SECTION("exceeds phase index under normal dispersion") {
    for (double l : {450.0, 562.0, 1064.0, 1455.0}) {
      CHECK(group_index(c, "y", l, 25.0) > refractive_index(c, "y", l, 25.0));
      CHECK(group_index(c, "z", l, 25.0) > refractive_index(c, "z", l, 25.0));
    }
  }
  SECTION("matches finite difference at 1455 nm") {
    const double h = 0.1;
    const double fd = (refractive_index(c, "y", 1455.0 + h, 25.0) -
                       refractive_index(c, "y", 1455.0 - h, 25.0)) /
                      (2.0 * h);
    const double ng_fd = refractive_index(c, "y", 1455.0, 25.0) - 1455.0 * fd;
    CHECK(group_index(c, "y", 1455.0, 25.0) ==
          Catch::Approx(ng_fd).epsilon(1e-6));
  }
  SECTION("equals phase index for a flat fixture") {
    auto flat = spdctest::constant_crystal(1.8);
    CHECK(group_index(*flat, "a", 1000.0, 25.0) ==
          Catch::Approx(refractive_index(*flat, "a", 1000.0, 25.0))
              .margin(1e-12));
  }
}

TEST_CASE("shipped axes are monotone decreasing across the visible-telecom "
          "range", "[dispersion]") {
  for (const char* file :
       {"ktp.crystal", "rtp.crystal", "knbo3.crystal", "mgoln.crystal"}) {
    const CrystalDispersion c = load_crystal(data_path(file));
    for (const auto& axis : c.axes) {
      const AxisDispersion& ax = c.axis(axis);
      const double lo = std::max(450.0, ax.lambda_min_nm);
      const double hi = std::min(1600.0, ax.lambda_max_nm);
      for (double t : {c.temperature_min_c + 1.0, 80.0}) {
        if (t < c.temperature_min_c || t > c.temperature_max_c) continue;
        double prev = refractive_index(c, axis, lo, t);
        for (int i = 1; i <= 200; ++i) {
          const double l = lo + (hi - lo) * i / 200.0;
          const double n = refractive_index(c, axis, l, t);
          CHECK(n < prev);
          prev = n;
        }
      }
    }
  }
}

TEST_CASE("save and reload reproduce evaluations bit-stably", "[dispersion]") {
  for (const char* file : {"ktp.crystal", "mgoln.crystal", "knbo3.crystal"}) {
    const CrystalDispersion a = load_crystal(data_path(file));
    const std::string tmp = std::string("/tmp/spdc_roundtrip_") + file;
    save_crystal(a, tmp);
    const CrystalDispersion b = load_crystal(tmp);
    std::mt19937 rng(3);
    for (const auto& axis : a.axes) {
      const AxisDispersion& ax = a.axis(axis);
      std::uniform_real_distribution<double> lam(ax.lambda_min_nm,
                                                 ax.lambda_max_nm);
      std::uniform_real_distribution<double> temp(a.temperature_min_c,
                                                  a.temperature_max_c);
      for (int i = 0; i < 100; ++i) {
        const double l = lam(rng);
        const double t = temp(rng);
        const double na = refractive_index(a, axis, l, t);
        const double nb = refractive_index(b, axis, l, t);
        CHECK(std::abs(na - nb) <= 1e-15 * na);
      }
    }
  }
}

TEST_CASE("out-of-validity evaluation names the violated bound",
          "[dispersion]") {
  const CrystalDispersion c = load_crystal(data_path("ktp.crystal"));
  CHECK_THROWS_WITH(refractive_index(c, "y", 399.0, 25.0),
                    Catch::Matchers::ContainsSubstring("below lower"));
  CHECK_THROWS_WITH(refractive_index(c, "y", 3600.0, 25.0),
                    Catch::Matchers::ContainsSubstring("above upper"));
  CHECK_THROWS_WITH(refractive_index(c, "y", 562.0, 5.0),
                    Catch::Matchers::ContainsSubstring("below lower"));
  CHECK_THROWS_WITH(refractive_index(c, "y", 562.0, 150.0),
                    Catch::Matchers::ContainsSubstring("above upper"));
  CHECK_THROWS_AS(refractive_index(c, "x", 562.0, 25.0), ValidationError);
  CHECK_THROWS_AS(dn_dt(c, "z", 399.0, 25.0), OutOfRangeError);
  CHECK_THROWS_AS(group_index(c, "y", 400.2, 25.0), OutOfRangeError);
}
