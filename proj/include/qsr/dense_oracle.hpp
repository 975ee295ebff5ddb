// This code is licensed under the Apache License, Version 2.0. You may
// obtain a copy of this license at http://www.apache.org/licenses/LICENSE-2.0.

// Independent implementation of the whole pipeline in the flattened
// tensor-product picture (system (x) ancilla qubit, flattened index
// = ancilla_index * d + system_index so that indices 0..d-1 carry the
// |0> ancilla branch and d..2d-1 the |1> branch). Deliberately does not
// touch the block-operator algebra: agreement between the two paths is
// what makes this an oracle.

#ifndef QSR_DENSE_ORACLE_HPP
#define QSR_DENSE_ORACLE_HPP

#include <cmath>
#include <string>

#include "qsr/config.hpp"
#include "qsr/qcore.hpp"
#include "qsr/trial.hpp"

namespace qsr::dense {

/// sys (x) anc with the ancilla index slowest.
inline ComplexMatrix kron_with_qubit(const ComplexMatrix& sys, const ComplexMatrix& anc) {
  const Eigen::Index d = sys.rows();
  ComplexMatrix out = ComplexMatrix::Zero(2 * d, 2 * d);
  for (Eigen::Index r = 0; r < 2; ++r) {
    for (Eigen::Index c = 0; c < 2; ++c) {
      out.block(r * d, c * d, d, d) = anc(r, c) * sys;
    }
  }
  return out;
}

inline ComplexMatrix ancilla_proj(int ket, int bra) {
  ComplexMatrix p = ComplexMatrix::Zero(2, 2);
  p(ket, bra) = 1.0;
  return p;
}

/// rho (x) |0><0|.
inline ComplexMatrix dense_embed(const DensityMatrix& rho) {
  return kron_with_qubit(rho.mat(), ancilla_proj(0, 0));
}

/// K_0 = cos phi 1 (x) |0><0| + sin phi 1 (x) |0><1|,
/// K_1 = -cos phi 1 (x) |1><1| + sin phi 1 (x) |1><0|.
inline Instrument<ComplexMatrix> dense_quasi_copy(double phi, Eigen::Index d) {
  const ComplexMatrix id = ComplexMatrix::Identity(d, d);
  Instrument<ComplexMatrix> inst;
  inst.kind = InstrumentKind::channel;
  inst.labels = {"K0", "K1"};
  inst.operators.push_back(std::cos(phi) * kron_with_qubit(id, ancilla_proj(0, 0)) +
                           std::sin(phi) * kron_with_qubit(id, ancilla_proj(0, 1)));
  inst.operators.push_back(-std::cos(phi) * kron_with_qubit(id, ancilla_proj(1, 1)) +
                           std::sin(phi) * kron_with_qubit(id, ancilla_proj(1, 0)));
  return inst;
}

/// {(1/sqrt(n)) 1 (x) |0><0| + M_nu (x) |1><1|}_nu.
inline Instrument<ComplexMatrix> dense_outer_measurement(const ProtocolConfig& config) {
  const ComplexMatrix scaled_id =
      ComplexMatrix::Identity(config.d, config.d) / std::sqrt(static_cast<double>(config.n));
  Instrument<ComplexMatrix> inst;
  inst.kind = InstrumentKind::measurement;
  for (int nu = 0; nu < config.n; ++nu) {
    inst.labels.push_back("nu=" + std::to_string(nu + 1));
    inst.operators.push_back(kron_with_qubit(scaled_id, ancilla_proj(0, 0)) +
                             kron_with_qubit(config.inner_measurement[nu], ancilla_proj(1, 1)));
  }
  return inst;
}

/// Projective Pauli-Z measurement on the ancilla:
/// {1 (x) |0><0|, 1 (x) |1><1|}.
inline Instrument<ComplexMatrix> dense_recovery(Eigen::Index d) {
  const ComplexMatrix id = ComplexMatrix::Identity(d, d);
  Instrument<ComplexMatrix> inst;
  inst.kind = InstrumentKind::measurement;
  inst.labels = {"mu0", "mu1"};
  inst.operators.push_back(kron_with_qubit(id, ancilla_proj(0, 0)));
  inst.operators.push_back(kron_with_qubit(id, ancilla_proj(1, 1)));
  return inst;
}

/// Trace out the ancilla qubit of a 2d x 2d state.
inline ComplexMatrix partial_trace_ancilla(const ComplexMatrix& m) {
  const Eigen::Index d = m.rows() / 2;
  return m.topLeftCorner(d, d) + m.bottomRightCorner(d, d);
}

/// Same step structure and stream usage as run_protocol: one uniform for nu,
/// one for mu.
inline TrialRecord run_dense_pipeline(const ProtocolConfig& config, RngStream& rng) {
  const DensityMatrix rho0(config.rho0);
  const ComplexMatrix copied =
      apply_channel_raw(dense_quasi_copy(config.phi, config.d), dense_embed(rho0));
  const Instrument<ComplexMatrix> outer = dense_outer_measurement(config);
  const Instrument<ComplexMatrix> recovery = dense_recovery(config.d);

  TrialRecord trial;
  trial.nu = sample_outcome(outer, copied, rng);
  auto [post_nu, p_nu] = apply_outcome(outer, copied, trial.nu);
  trial.p_nu = p_nu;
  const double c2 = std::cos(config.phi) * std::cos(config.phi);
  trial.p_mu_given_nu = c2 / (config.n * p_nu);

  trial.mu = sample_outcome(recovery, post_nu, rng);
  auto [post_mu, p_mu] = apply_outcome(recovery, post_nu, trial.mu);
  (void)p_mu;
  ComplexMatrix reduced = partial_trace_ancilla(post_mu);
  reduced = 0.5 * (reduced + reduced.adjoint().eval());
  DensityMatrix out(reduced / reduced.trace().real());
  trial.fidelity_to_rho0 = fidelity(out, rho0);
  if (trial.mu == kOutcomeSuccess) {
    trial.recovered = out;
  } else {
    trial.failure_state = out;
  }
  return trial;
}

}  // namespace qsr::dense

#endif  // QSR_DENSE_ORACLE_HPP
