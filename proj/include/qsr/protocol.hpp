// This code is licensed under the Apache License, Version 2.0. You may
// obtain a copy of this license at http://www.apache.org/licenses/LICENSE-2.0.

#ifndef QSR_PROTOCOL_HPP
#define QSR_PROTOCOL_HPP

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "qsr/blockalg.hpp"
#include "qsr/config.hpp"
#include "qsr/qcore.hpp"
#include "qsr/trial.hpp"

namespace qsr {

/// Thrown when the success-conditioned posterior is requested at cos(phi)=0,
/// where no trial ever succeeds and the posterior is undefined.
struct PosteriorUndefined : std::domain_error {
  PosteriorUndefined() : std::domain_error("posterior undefined: success probability is zero") {}
};

/// Step A: rho (+) 0, the system with a fresh ancilla attached.
inline BlockOperator embed_with_ancilla(const DensityMatrix& rho) {
  return BlockOperator::direct_sum(rho.mat(),
                                   ComplexMatrix::Zero(rho.dim(), rho.dim()));
}

/// Step B channel: K_0 = (cos phi 1)(+)0 + (sin phi 1)[+]0,
///                 K_1 = 0(+)(-cos phi 1) + 0[+](sin phi 1).
inline Instrument<BlockOperator> quasi_copy_channel(double phi, Eigen::Index d) {
  const ComplexMatrix id = ComplexMatrix::Identity(d, d);
  const ComplexMatrix zero = ComplexMatrix::Zero(d, d);
  Instrument<BlockOperator> inst;
  inst.kind = InstrumentKind::channel;
  inst.labels = {"K0", "K1"};
  inst.operators.push_back(BlockOperator::direct_sum(std::cos(phi) * id, zero) +
                           BlockOperator::box_plus(std::sin(phi) * id, zero));
  inst.operators.push_back(BlockOperator::direct_sum(zero, -std::cos(phi) * id) +
                           BlockOperator::box_plus(zero, std::sin(phi) * id));
  return inst;
}

/// Closed-form action of the quasi-copy channel on rho (+) 0:
/// (cos^2 phi rho) (+) (sin^2 phi rho).
inline BlockOperator apply_quasi_copy(const BlockOperator& state, double phi) {
  if (state.has_off_part() || (state.has_diag_part() && !state.diag_bot().isZero(0.0))) {
    throw std::invalid_argument("apply_quasi_copy: state is not of the form rho (+) 0");
  }
  const double c2 = std::cos(phi) * std::cos(phi);
  const double s2 = std::sin(phi) * std::sin(phi);
  return BlockOperator::direct_sum(c2 * state.diag_top(), s2 * state.diag_top());
}

/// Step C: {(1/sqrt(n)) 1 (+) M_nu}_nu. Touches only the complement space.
inline Instrument<BlockOperator> outer_measurement(const ProtocolConfig& config) {
  const ComplexMatrix scaled_id =
      ComplexMatrix::Identity(config.d, config.d) / std::sqrt(static_cast<double>(config.n));
  Instrument<BlockOperator> inst;
  inst.kind = InstrumentKind::measurement;
  for (int nu = 0; nu < config.n; ++nu) {
    inst.labels.push_back("nu=" + std::to_string(nu + 1));
    inst.operators.push_back(
        BlockOperator::direct_sum(scaled_id, config.inner_measurement[nu]));
  }
  return inst;
}

/// P[nu] = cos^2(phi)/n + sin^2(phi) tr(M_nu rho M_nu^dag), 0-based nu.
inline double outcome_probability(std::size_t nu, const ProtocolConfig& config) {
  if (nu >= config.inner_measurement.size()) {
    throw std::out_of_range("outcome_probability: nu out of range");
  }
  const ComplexMatrix& m = config.inner_measurement[nu];
  const double c2 = std::cos(config.phi) * std::cos(config.phi);
  const double s2 = std::sin(config.phi) * std::sin(config.phi);
  return c2 / config.n + s2 * (m * config.rho0 * m.adjoint()).trace().real();
}

/// Step D: {R_mu0 = 1 (+) 0, R_mu1 = 0 (+) 1}. Takes no nu argument; the
/// recovery cannot depend on the first measurement's outcome.
inline Instrument<BlockOperator> recovery_instrument(Eigen::Index d) {
  const ComplexMatrix id = ComplexMatrix::Identity(d, d);
  const ComplexMatrix zero = ComplexMatrix::Zero(d, d);
  Instrument<BlockOperator> inst;
  inst.kind = InstrumentKind::measurement;
  inst.labels = {"mu0", "mu1"};
  inst.operators.push_back(BlockOperator::direct_sum(id, zero));
  inst.operators.push_back(BlockOperator::direct_sum(zero, id));
  return inst;
}

inline double reversal_probability(double phi) { return std::cos(phi) * std::cos(phi); }

/// Reduced d x d state after discarding the ancilla: sum of diagonal blocks.
inline DensityMatrix reduce_block_state(const BlockOperator& state) {
  ComplexMatrix r = state.diag_top() + state.diag_bot();
  r = 0.5 * (r + r.adjoint().eval());
  return DensityMatrix(r / r.trace().real());
}

/// Steps A-D end to end. Consumes exactly two uniforms from the stream:
/// one for nu, one for mu.
inline TrialRecord run_protocol(const ProtocolConfig& config, RngStream& rng) {
  const DensityMatrix rho0(config.rho0);
  const BlockOperator copied = apply_quasi_copy(embed_with_ancilla(rho0), config.phi);
  const Instrument<BlockOperator> outer = outer_measurement(config);
  const Instrument<BlockOperator> recovery = recovery_instrument(config.d);

  TrialRecord trial;
  trial.nu = sample_outcome(outer, copied, rng);
  auto [post_nu, p_nu] = apply_outcome(outer, copied, trial.nu);
  trial.p_nu = p_nu;
  const double c2 = std::cos(config.phi) * std::cos(config.phi);
  trial.p_mu_given_nu = c2 / (config.n * p_nu);

  trial.mu = sample_outcome(recovery, post_nu, rng);
  auto [post_mu, p_mu] = apply_outcome(recovery, post_nu, trial.mu);
  (void)p_mu;
  if (trial.mu == kOutcomeSuccess) {
    trial.recovered = reduce_block_state(post_mu);
    trial.fidelity_to_rho0 = fidelity(*trial.recovered, rho0);
  } else {
    trial.failure_state = reduce_block_state(post_mu);
    trial.fidelity_to_rho0 = fidelity(*trial.failure_state, rho0);
  }
  return trial;
}

/// P[nu | mu_0] = P[mu_0 | nu] P[nu] / P[mu_0]; flat at 1/n for any valid
/// config with cos(phi) != 0.
inline std::vector<double> posterior_given_success(const ProtocolConfig& config) {
  const double c2 = std::cos(config.phi) * std::cos(config.phi);
  if (c2 <= kZeroProbTol) throw PosteriorUndefined();
  std::vector<double> joint(config.n);
  double p_mu0 = 0.0;
  for (int nu = 0; nu < config.n; ++nu) {
    const double p_nu = outcome_probability(nu, config);
    joint[nu] = (c2 / (config.n * p_nu)) * p_nu;
    p_mu0 += joint[nu];
  }
  for (double& p : joint) p /= p_mu0;
  return joint;
}

}  // namespace qsr

#endif  // QSR_PROTOCOL_HPP
