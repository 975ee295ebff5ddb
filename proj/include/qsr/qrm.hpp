// This code is licensed under the Apache License, Version 2.0. You may
// obtain a copy of this license at http://www.apache.org/licenses/LICENSE-2.0.

#ifndef QSR_QRM_HPP
#define QSR_QRM_HPP

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "qsr/protocol.hpp"
#include "qsr/qcore.hpp"
#include "qsr/trial.hpp"

namespace qsr {

inline constexpr double kSingularTol = 1e-12;

/// Conventional outcome-dependent reversal baseline: measurement operators
/// m_nu acting directly on the d-dimensional space.
struct QrmInstrument {
  std::vector<ComplexMatrix> operators;

  void validate(double tol = kDefaultTol) const {
    if (operators.empty()) throw std::invalid_argument("QrmInstrument: empty");
    const Eigen::Index d = operators.front().rows();
    ComplexMatrix sum = ComplexMatrix::Zero(d, d);
    for (const auto& m : operators) {
      if (m.rows() != d || m.cols() != d) {
        throw std::invalid_argument("QrmInstrument: operator dimension mismatch");
      }
      sum += m.adjoint() * m;
    }
    if ((sum - ComplexMatrix::Identity(d, d)).norm() > tol) {
      throw std::invalid_argument("QrmInstrument: incomplete");
    }
  }

  Instrument<ComplexMatrix> as_instrument() const {
    Instrument<ComplexMatrix> inst;
    inst.kind = InstrumentKind::measurement;
    for (std::size_t nu = 0; nu < operators.size(); ++nu) {
      inst.labels.push_back("nu=" + std::to_string(nu + 1));
      inst.operators.push_back(operators[nu]);
    }
    return inst;
  }
};

/// R = sigma_min(m) m^{-1}, the largest rescaling of the inverse that still
/// fits inside a complete recovery instrument (largest singular value 1).
inline ComplexMatrix qrm_reversal_operator(const ComplexMatrix& m) {
  Eigen::JacobiSVD<ComplexMatrix> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const double sigma_min = svd.singularValues().minCoeff();
  if (sigma_min <= kSingularTol) {
    throw std::domain_error("qrm_reversal_operator: singular operator, outcome irreversible");
  }
  return sigma_min * svd.matrixV() * svd.singularValues().cwiseInverse().asDiagonal() *
         svd.matrixU().adjoint();
}

/// P_qrm[rev] = sum_nu min-eig(m_nu^dag m_nu); state-independent.
inline double qrm_max_reversal_probability(const QrmInstrument& inst,
                                           double tol = kDefaultTol) {
  inst.validate(tol);
  double total = 0.0;
  for (const auto& m : inst.operators) {
    total += std::max(0.0, min_eigenvalue(m.adjoint() * m));
  }
  return total;
}

/// Instrument with the same outcome statistics as the protocol's P[nu]:
/// m_nu = sqrt((cos^2 phi / n) 1 + sin^2 phi M_nu^dag M_nu), the Hermitian
/// PSD representative of the polar freedom.
inline QrmInstrument matched_qrm_instrument(const ProtocolConfig& config) {
  const double c2 = std::cos(config.phi) * std::cos(config.phi);
  const double s2 = std::sin(config.phi) * std::sin(config.phi);
  const ComplexMatrix id = ComplexMatrix::Identity(config.d, config.d);
  QrmInstrument inst;
  for (const auto& m : config.inner_measurement) {
    inst.operators.push_back(psd_sqrt((c2 / config.n) * id + s2 * (m.adjoint() * m).eval()));
  }
  return inst;
}

struct TradeoffReport {
  double p_qrm = 0.0;
  double p_ours = 0.0;
  double delta = 0.0;
  std::vector<double> min_eigs;  // min-eig(M_nu^dag M_nu) per outcome
  bool condition_holds = false;  // every min_eig is 0 (within kSingularTol)
};

/// Compares the matched QRM baseline's maximum reversal probability with the
/// protocol's cos^2 phi. Equality holds exactly when every M_nu^dag M_nu has
/// a zero minimum eigenvalue; otherwise the QRM baseline does strictly
/// better by sin^2 phi times the excess eigenvalue mass.
inline TradeoffReport tradeoff_check(const ProtocolConfig& config) {
  TradeoffReport report;
  report.p_ours = reversal_probability(config.phi);
  report.p_qrm = qrm_max_reversal_probability(matched_qrm_instrument(config));
  report.delta = report.p_qrm - report.p_ours;
  report.condition_holds = true;
  for (const auto& m : config.inner_measurement) {
    report.min_eigs.push_back(std::max(0.0, min_eigenvalue(m.adjoint() * m)));
    report.condition_holds = report.condition_holds && report.min_eigs.back() <= kSingularTol;
  }
  return report;
}

inline nlohmann::json tradeoff_to_json(const TradeoffReport& r, double phi) {
  return {{"phi", phi},          {"p_qrm", r.p_qrm},
          {"p_ours", r.p_ours},  {"delta", r.delta},
          {"min_eigs", r.min_eigs}, {"condition_holds", r.condition_holds}};
}

/// One QRM round: measure, then attempt the outcome-dependent reversal.
/// Consumes exactly two uniforms, matching run_protocol's stream usage.
inline TrialRecord run_qrm_protocol(const QrmInstrument& inst, const DensityMatrix& rho,
                                    RngStream& rng) {
  const Instrument<ComplexMatrix> measurement = inst.as_instrument();
  TrialRecord trial;
  trial.nu = sample_outcome(measurement, rho, rng);
  auto [post_nu, p_nu] = apply_outcome(measurement, rho.mat(), trial.nu);
  trial.p_nu = p_nu;

  const ComplexMatrix r = qrm_reversal_operator(inst.operators[trial.nu]);
  const ComplexMatrix id = ComplexMatrix::Identity(r.rows(), r.cols());
  Instrument<ComplexMatrix> recovery;
  recovery.kind = InstrumentKind::measurement;
  recovery.labels = {"success", "failure"};
  recovery.operators = {r, psd_sqrt(id - (r.adjoint() * r).eval())};
  trial.p_mu_given_nu = outcome_distribution(recovery, post_nu)[kOutcomeSuccess];

  trial.mu = sample_outcome(recovery, post_nu, rng);
  auto [post_mu, p_mu] = apply_outcome(recovery, post_nu, trial.mu);
  (void)p_mu;
  DensityMatrix out(0.5 * (post_mu + post_mu.adjoint().eval()));
  trial.fidelity_to_rho0 = fidelity(out, rho);
  if (trial.mu == kOutcomeSuccess) {
    trial.recovered = out;
  } else {
    trial.failure_state = out;
  }
  return trial;
}

}  // namespace qsr

#endif  // QSR_QRM_HPP
