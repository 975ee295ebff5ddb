// This code is licensed under the Apache License, Version 2.0. You may
// obtain a copy of this license at http://www.apache.org/licenses/LICENSE-2.0.

#ifndef QSR_QCORE_HPP
#define QSR_QCORE_HPP

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "qsr/matrix.hpp"
#include "qsr/rng.hpp"

namespace qsr {

inline constexpr double kDefaultTol = 1e-10;
inline constexpr double kZeroProbTol = 1e-14;

// Uniform surface over operator carriers (ComplexMatrix here, BlockOperator
// via the overloads in blockalg.hpp) so the instrument machinery below can
// be written once.
inline ComplexMatrix identity_like(const ComplexMatrix& m) {
  return ComplexMatrix::Identity(m.rows(), m.cols());
}
inline const ComplexMatrix& dense_form(const ComplexMatrix& m) { return m; }
inline Complex op_trace(const ComplexMatrix& m) { return m.trace(); }
inline Eigen::Index op_dim(const ComplexMatrix& m) { return m.rows(); }

/// Hermitian, PSD, unit-trace matrix.
class DensityMatrix {
 public:
  explicit DensityMatrix(ComplexMatrix m, double tol = kDefaultTol) : mat_(std::move(m)) {
    if (!is_hermitian(mat_, tol)) throw std::invalid_argument("DensityMatrix: not Hermitian");
    if (min_eigenvalue(mat_) < -tol) throw std::invalid_argument("DensityMatrix: not PSD");
    if (std::abs(mat_.trace().real() - 1.0) > tol || std::abs(mat_.trace().imag()) > tol) {
      throw std::invalid_argument("DensityMatrix: trace is not 1");
    }
  }

  const ComplexMatrix& mat() const { return mat_; }
  Eigen::Index dim() const { return mat_.rows(); }

 private:
  ComplexMatrix mat_;
};

enum class InstrumentKind { channel, measurement };

/// Labeled family of measurement/Kraus operators. Channels discard the
/// label, measurements report it.
template <class Op>
struct Instrument {
  InstrumentKind kind = InstrumentKind::measurement;
  std::vector<std::string> labels;
  std::vector<Op> operators;

  std::size_t size() const { return operators.size(); }
};

struct InstrumentReport {
  std::vector<bool> operator_positive;  // positivity of M^dag M, per operator
  double completeness_residual = 0.0;   // Frobenius norm of sum M^dag M - 1
  bool pass = false;
};

template <class Op>
InstrumentReport validate_instrument(const Instrument<Op>& inst, double tol = kDefaultTol) {
  if (inst.operators.empty()) throw std::invalid_argument("validate_instrument: empty instrument");
  const Eigen::Index d = op_dim(inst.operators.front());
  InstrumentReport report;
  Op sum = inst.operators.front().adjoint() * inst.operators.front();
  for (std::size_t i = 0; i < inst.operators.size(); ++i) {
    if (op_dim(inst.operators[i]) != d) {
      throw std::invalid_argument("validate_instrument: operator dimension mismatch");
    }
    Op mm = inst.operators[i].adjoint() * inst.operators[i];
    report.operator_positive.push_back(min_eigenvalue(dense_form(mm)) >= -tol);
    if (i > 0) sum = sum + mm;
  }
  const ComplexMatrix dense = dense_form(sum);
  report.completeness_residual =
      (dense - ComplexMatrix::Identity(dense.rows(), dense.cols())).norm();
  report.pass = report.completeness_residual <= tol;
  for (bool p : report.operator_positive) report.pass = report.pass && p;
  return report;
}

/// probs[x] = Tr[M_x rho M_x^dag].
template <class Op, class State>
std::vector<double> outcome_distribution(const Instrument<Op>& inst, const State& state) {
  std::vector<double> probs;
  probs.reserve(inst.operators.size());
  for (const Op& m : inst.operators) {
    State t = m * state * m.adjoint();
    probs.push_back(op_trace(t).real());
  }
  return probs;
}

inline std::vector<double> outcome_distribution(const Instrument<ComplexMatrix>& inst,
                                                const DensityMatrix& rho) {
  return outcome_distribution(inst, rho.mat());
}

/// Post-measurement state and probability for a specific outcome.
template <class Op, class State>
std::pair<State, double> apply_outcome(const Instrument<Op>& inst, const State& state,
                                       std::size_t x) {
  if (x >= inst.operators.size()) throw std::out_of_range("apply_outcome: no such outcome");
  State t = inst.operators[x] * state * inst.operators[x].adjoint();
  const double p = op_trace(t).real();
  if (p <= kZeroProbTol) throw std::domain_error("apply_outcome: zero-probability outcome");
  return {Complex(1.0 / p) * t, p};
}

/// Inverse-CDF sample over outcome_distribution; deterministic in the stream.
template <class Op, class State>
std::size_t sample_outcome(const Instrument<Op>& inst, const State& state, RngStream& rng) {
  const std::vector<double> probs = outcome_distribution(inst, state);
  const double u = rng.next_double();
  double cdf = 0.0;
  for (std::size_t x = 0; x + 1 < probs.size(); ++x) {
    cdf += probs[x];
    if (u < cdf) return x;
  }
  return probs.size() - 1;
}

/// sum_x K_x state K_x^dag, unclipped.
template <class Op, class State>
State apply_channel_raw(const Instrument<Op>& inst, const State& state) {
  State out = inst.operators.front() * state * inst.operators.front().adjoint();
  for (std::size_t x = 1; x < inst.operators.size(); ++x) {
    out = out + inst.operators[x] * state * inst.operators[x].adjoint();
  }
  return out;
}

/// Channel application on a density matrix. Eigenvalues in [-1e-10, 0) are
/// clipped to 0 and the state renormalized so rounding drift cannot cascade
/// into downstream positivity failures.
inline DensityMatrix apply_channel(const Instrument<ComplexMatrix>& inst,
                                   const DensityMatrix& rho) {
  ComplexMatrix out = apply_channel_raw(inst, rho.mat());
  out = 0.5 * (out + out.adjoint().eval());
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(out);
  if (es.eigenvalues().minCoeff() < 0.0) {
    if (es.eigenvalues().minCoeff() < -kDefaultTol) {
      throw std::runtime_error("apply_channel: output state is not PSD");
    }
    Eigen::VectorXd ev = es.eigenvalues().cwiseMax(0.0);
    out = es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().adjoint();
  }
  out /= out.trace().real();
  return DensityMatrix(std::move(out));
}

/// Uhlmann fidelity tr sqrt(sqrt(rho) sigma sqrt(rho)), in [0, 1]; equals 1
/// iff the states coincide.
inline double fidelity(const ComplexMatrix& rho, const ComplexMatrix& sigma) {
  const ComplexMatrix sr = psd_sqrt(rho);
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(sr * sigma * sr, Eigen::EigenvaluesOnly);
  double f = es.eigenvalues().cwiseMax(0.0).cwiseSqrt().sum();
  return std::min(f, 1.0);
}

/// (1/2) tr |rho - sigma|, in [0, 1].
inline double trace_distance(const ComplexMatrix& rho, const ComplexMatrix& sigma) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(rho - sigma, Eigen::EigenvaluesOnly);
  return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

inline double fidelity(const DensityMatrix& rho, const DensityMatrix& sigma) {
  return fidelity(rho.mat(), sigma.mat());
}
inline double trace_distance(const DensityMatrix& rho, const DensityMatrix& sigma) {
  return trace_distance(rho.mat(), sigma.mat());
}

// Instrument JSON: {"kind": ..., "operators": [{"label": ..., "matrix": M}]}.
inline nlohmann::json instrument_to_json(const Instrument<ComplexMatrix>& inst) {
  nlohmann::json ops = nlohmann::json::array();
  for (std::size_t i = 0; i < inst.size(); ++i) {
    ops.push_back({{"label", inst.labels[i]}, {"matrix", matrix_to_json(inst.operators[i])}});
  }
  return {{"kind", inst.kind == InstrumentKind::channel ? "channel" : "measurement"},
          {"operators", std::move(ops)}};
}

inline Instrument<ComplexMatrix> instrument_from_json(const nlohmann::json& j) {
  Instrument<ComplexMatrix> inst;
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "channel") {
    inst.kind = InstrumentKind::channel;
  } else if (kind == "measurement") {
    inst.kind = InstrumentKind::measurement;
  } else {
    throw std::invalid_argument("instrument_from_json: unknown kind '" + kind + "'");
  }
  for (const auto& op : j.at("operators")) {
    inst.labels.push_back(op.at("label").get<std::string>());
    inst.operators.push_back(matrix_from_json(op.at("matrix")));
  }
  return inst;
}

}  // namespace qsr

#endif  // QSR_QCORE_HPP
