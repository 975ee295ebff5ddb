// This code is licensed under the Apache License, Version 2.0. You may
// obtain a copy of this license at http://www.apache.org/licenses/LICENSE-2.0.

#ifndef QSR_CONFIG_IO_HPP
#define QSR_CONFIG_IO_HPP

#include <cstdint>
#include <stdexcept>
#include <string>

#include "qsr/config.hpp"
#include "qsr/sampling.hpp"

namespace qsr {

// Reserved stream ids so family generation never collides with trial streams
// (trials use stream = trial index).
inline constexpr std::uint64_t kStreamInnerFamily = 0xf1a3'0001ull << 32;
inline constexpr std::uint64_t kStreamRhoFamily = 0xf1a3'0002ull << 32;

// ProtocolConfig JSON:
//   {"d":..., "phi":..., "n":..., "seed":...,
//    "inner_measurement": [M, ...] | {"family":"random_povm"|"projective","seed":...},
//    "rho0": M | {"family":"random_pure"|"random_mixed"|"maximally_mixed","seed":...}}
inline ProtocolConfig config_from_json(const nlohmann::json& j) {
  ProtocolConfig config;
  config.d = j.at("d").get<Eigen::Index>();
  config.phi = j.at("phi").get<double>();
  config.n = j.at("n").get<int>();
  config.seed = j.value("seed", std::uint64_t{0});

  const auto& inner = j.at("inner_measurement");
  if (inner.is_array()) {
    for (const auto& m : inner) config.inner_measurement.push_back(matrix_from_json(m));
  } else {
    const std::string family = inner.at("family").get<std::string>();
    RngStream rng(inner.value("seed", config.seed), kStreamInnerFamily);
    if (family == "random_povm") {
      config.inner_measurement = random_povm(config.d, config.n, rng);
    } else if (family == "projective") {
      config.inner_measurement = projective_family(config.d, config.n, rng);
    } else {
      throw std::invalid_argument("config_from_json: unknown measurement family '" + family + "'");
    }
  }

  const auto& rho = j.at("rho0");
  if (rho.is_object() && rho.contains("family")) {
    const std::string family = rho.at("family").get<std::string>();
    RngStream rng(rho.value("seed", config.seed), kStreamRhoFamily);
    if (family == "random_pure") {
      config.rho0 = random_pure_state(config.d, rng);
    } else if (family == "random_mixed") {
      config.rho0 = random_mixed_state(config.d, rng);
    } else if (family == "maximally_mixed") {
      config.rho0 = maximally_mixed_state(config.d);
    } else {
      throw std::invalid_argument("config_from_json: unknown state family '" + family + "'");
    }
  } else {
    config.rho0 = matrix_from_json(rho);
  }
  return config;
}

inline nlohmann::json config_to_json(const ProtocolConfig& config) {
  nlohmann::json inner = nlohmann::json::array();
  for (const auto& m : config.inner_measurement) inner.push_back(matrix_to_json(m));
  return {{"d", config.d},       {"phi", config.phi},
          {"n", config.n},       {"seed", config.seed},
          {"inner_measurement", std::move(inner)}, {"rho0", matrix_to_json(config.rho0)}};
}

}  // namespace qsr

#endif  // QSR_CONFIG_IO_HPP
