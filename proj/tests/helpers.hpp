#ifndef SPDC_TESTS_HELPERS_HPP
#define SPDC_TESTS_HELPERS_HPP

#include <memory>
#include <random>
#include <string>

#include "spdc/dispersion.hpp"
#include "spdc/phasematch.hpp"

namespace spdctest {

inline std::string data_path(const std::string& name) {
  return std::string(SPDC_DATA_DIR) + "/" + name;
}

inline std::shared_ptr<const spdc::CrystalDispersion> load_shared(
    const std::string& name) {
  return std::make_shared<spdc::CrystalDispersion>(
      spdc::load_crystal(data_path(name)));
}

// Dispersionless fixture: n identical on every axis, no thermal dependence.
inline std::shared_ptr<const spdc::CrystalDispersion> constant_crystal(
    double n = 1.8) {
  auto c = std::make_shared<spdc::CrystalDispersion>();
  c->name = "constant-fixture";
  c->id = "const";
  c->axes = {"a", "b"};
  c->temperature_min_c = 0.0;
  c->temperature_max_c = 200.0;
  spdc::AxisDispersion ax;
  ax.sellmeier.form = spdc::SellmeierForm::RationalTwoPole;
  ax.sellmeier.coefficients = {n * n, 0.0, 0.0, 0.0, 0.0, 0.0};
  ax.sellmeier.reference_temperature_c = 25.0;
  ax.thermal.form = spdc::ThermalForm::None;
  ax.lambda_min_nm = 300.0;
  ax.lambda_max_nm = 4000.0;
  c->dispersion["a"] = ax;
  c->dispersion["b"] = ax;
  spdc::validate_crystal(*c);
  return c;
}

inline spdc::ProcessSpec ktp_ncpm(
    std::shared_ptr<const spdc::CrystalDispersion> ktp) {
  return {std::move(ktp), "y", "z", "y", {}, "ncpm-ktp"};
}

}  // namespace spdctest

#endif
