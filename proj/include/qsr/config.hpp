// This code is licensed under the Apache License, Version 2.0. You may
// obtain a copy of this license at http://www.apache.org/licenses/LICENSE-2.0.

#ifndef QSR_CONFIG_HPP
#define QSR_CONFIG_HPP

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "qsr/qcore.hpp"

namespace qsr {

struct ProtocolConfig {
  Eigen::Index d = 0;     // dimension of the principal system
  double phi = 0.0;       // quasi-copy angle
  int n = 0;              // number of inner measurement outcomes
  std::vector<ComplexMatrix> inner_measurement;  // M_nu on the complement space
  ComplexMatrix rho0;
  std::uint64_t seed = 0;

  void validate(double tol = kDefaultTol) const {
    if (d <= 0) throw std::invalid_argument("ProtocolConfig: d must be positive");
    if (n <= 0 || static_cast<int>(inner_measurement.size()) != n) {
      throw std::invalid_argument("ProtocolConfig: need n inner measurement operators");
    }
    ComplexMatrix sum = ComplexMatrix::Zero(d, d);
    for (const auto& m : inner_measurement) {
      if (m.rows() != d || m.cols() != d) {
        throw std::invalid_argument("ProtocolConfig: inner operator is not d x d");
      }
      sum += m.adjoint() * m;
    }
    if ((sum - ComplexMatrix::Identity(d, d)).norm() > tol) {
      throw std::invalid_argument("ProtocolConfig: inner measurement family is incomplete");
    }
    DensityMatrix check(rho0, tol);  // throws if rho0 is not a valid state
    (void)check;
  }
};

}  // namespace qsr

#endif  // QSR_CONFIG_HPP
