// This code is licensed under the Apache License, Version 2.0. You may
// obtain a copy of this license at http://www.apache.org/licenses/LICENSE-2.0.

#ifndef QSR_TRIAL_HPP
#define QSR_TRIAL_HPP

#include <cstddef>
#include <optional>

#include "qsr/qcore.hpp"

namespace qsr {

inline constexpr std::size_t kOutcomeSuccess = 0;  // mu_0
inline constexpr std::size_t kOutcomeFailure = 1;  // mu_1

/// One end-to-end protocol run.
struct TrialRecord {
  std::size_t nu = 0;               // inner measurement outcome, 0-based
  std::size_t mu = kOutcomeFailure;  // recovery outcome
  double p_nu = 0.0;
  double p_mu_given_nu = 0.0;  // P[mu_0 | nu]
  std::optional<DensityMatrix> recovered;  // reduced state, success branch only
  std::optional<DensityMatrix> failure_state;  // reduced post-mu_1 state, diagnostics
  double fidelity_to_rho0 = 0.0;

  bool success() const { return mu == kOutcomeSuccess; }
};

inline nlohmann::json trial_to_json(const TrialRecord& t) {
  nlohmann::json j{{"nu", t.nu},
                   {"mu", t.mu == kOutcomeSuccess ? "mu0" : "mu1"},
                   {"p_nu", t.p_nu},
                   {"p_mu0_given_nu", t.p_mu_given_nu},
                   {"fidelity_to_rho0", t.fidelity_to_rho0}};
  if (t.recovered) j["recovered"] = matrix_to_json(t.recovered->mat());
  if (t.failure_state) j["failure_state"] = matrix_to_json(t.failure_state->mat());
  return j;
}

}  // namespace qsr

#endif  // QSR_TRIAL_HPP
