// This code is licensed under the Apache License, Version 2.0. You may
// obtain a copy of this license at http://www.apache.org/licenses/LICENSE-2.0.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <numbers>

#include "qsr/protocol.hpp"
#include "qsr/qcore.hpp"
#include "qsr/sampling.hpp"
#include "test_helpers.hpp"

using namespace qsr;

namespace {

Instrument<ComplexMatrix> measurement_from(std::vector<ComplexMatrix> ops) {
  Instrument<ComplexMatrix> inst;
  inst.kind = InstrumentKind::measurement;
  for (std::size_t i = 0; i < ops.size(); ++i) inst.labels.push_back("x" + std::to_string(i));
  inst.operators = std::move(ops);
  return inst;
}

ComplexMatrix ket_proj(Eigen::Index d, Eigen::Index k) {
  ComplexMatrix p = ComplexMatrix::Zero(d, d);
  p(k, k) = 1.0;
  return p;
}

// Independent probability oracle: explicit loops, no matrix library calls.
double brute_force_probability(const ComplexMatrix& m, const ComplexMatrix& rho) {
  const Eigen::Index d = m.rows();
  Complex tr = 0.0;
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) {
      for (Eigen::Index k = 0; k < d; ++k) {
        // (M rho M^dag)_{ii} = sum_{jk} M_{ij} rho_{jk} conj(M_{ik})
        tr += m(i, j) * rho(j, k) * std::conj(m(i, k));
      }
    }
  }
  return tr.real();
}

}  // namespace

TEST_CASE("validate_instrument on identity, scaled identity, and K pairs") {
  auto id_inst = measurement_from({ComplexMatrix::Identity(3, 3)});
  auto r = validate_instrument(id_inst);
  CHECK(r.pass);
  CHECK(r.completeness_residual == 0.0);

  auto half = measurement_from({0.5 * ComplexMatrix::Identity(3, 3)});
  r = validate_instrument(half);
  CHECK_FALSE(r.pass);
  CHECK(r.completeness_residual > 1e-10);

  RngStream rng(3, 0);
  for (int rep = 0; rep < 20; ++rep) {
    const double phi = rng.next_double() * std::numbers::pi;
    const auto d = static_cast<Eigen::Index>(2 + rng.next_u64() % 4);
    CHECK(validate_instrument(quasi_copy_channel(phi, d)).pass);
  }
}

TEST_CASE("validate_instrument rejects mismatched dimensions") {
  auto inst = measurement_from({ComplexMatrix::Identity(2, 2), ComplexMatrix::Identity(3, 3)});
  CHECK_THROWS_AS(validate_instrument(inst), std::invalid_argument);
}

TEST_CASE("outcome distributions: eigenstate, mixed state, and brute-force oracle") {
  auto z_basis = measurement_from({ket_proj(2, 0), ket_proj(2, 1)});
  const DensityMatrix ground(ket_proj(2, 0));
  auto probs = outcome_distribution(z_basis, ground);
  CHECK(probs[0] == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(probs[1] == doctest::Approx(0.0).epsilon(1e-14));

  const DensityMatrix mixed(maximally_mixed_state(2));
  probs = outcome_distribution(z_basis, mixed);
  CHECK(probs[0] == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(probs[1] == doctest::Approx(0.5).epsilon(1e-14));

  RngStream rng(5, 0);
  for (int rep = 0; rep < 10; ++rep) {
    auto inst = measurement_from(random_povm(4, 3, rng));
    const DensityMatrix rho(random_mixed_state(4, rng));
    probs = outcome_distribution(inst, rho);
    double total = 0.0;
    for (std::size_t x = 0; x < probs.size(); ++x) {
      CHECK(probs[x] ==
            doctest::Approx(brute_force_probability(inst.operators[x], rho.mat())).epsilon(1e-12));
      total += probs[x];
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-10));
  }
}

TEST_CASE("apply_outcome: projective update, unitary channel, invariants") {
  auto z_basis = measurement_from({ket_proj(2, 0), ket_proj(2, 1)});
  ComplexMatrix rho = ComplexMatrix::Zero(2, 2);
  rho(0, 0) = 0.25;
  rho(1, 1) = 0.75;
  auto [post, p] = apply_outcome(z_basis, rho, 1);
  CHECK(p == doctest::Approx(0.75));
  CHECK(testing::max_abs_diff(post, ket_proj(2, 1)) < 1e-14);

  RngStream rng(7, 0);
  auto unitary = measurement_from({haar_unitary(3, rng)});
  const ComplexMatrix sigma = random_mixed_state(3, rng);
  auto [u_post, u_p] = apply_outcome(unitary, sigma, 0);
  CHECK(u_p == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(testing::max_abs_diff(
            u_post, unitary.operators[0] * sigma * unitary.operators[0].adjoint()) < 1e-12);

  for (int rep = 0; rep < 10; ++rep) {
    auto inst = measurement_from(random_povm(3, 2, rng));
    auto [state, prob] = apply_outcome(inst, random_mixed_state(3, rng), rep % 2);
    CHECK(prob > 0.0);
    CHECK_NOTHROW(DensityMatrix{state});
  }

  // zero-probability branch
  auto [ignored, p0] = apply_outcome(z_basis, ket_proj(2, 0), 0);
  (void)ignored;
  (void)p0;
  CHECK_THROWS_AS(apply_outcome(z_basis, ket_proj(2, 0), 1), std::domain_error);
}

TEST_CASE("sample_outcome: determinism and binomial statistics") {
  auto z_basis = measurement_from({ket_proj(2, 0), ket_proj(2, 1)});
  RngStream rng(9, 0);
  for (int rep = 0; rep < 100; ++rep) {
    CHECK(sample_outcome(z_basis, ket_proj(2, 0), rng) == 0);
  }

  const ComplexMatrix mixed = maximally_mixed_state(2);
  const int n_samples = 100000;
  int count = 0;
  for (int i = 0; i < n_samples; ++i) {
    RngStream trial = RngStream::for_trial(123, i);
    count += sample_outcome(z_basis, mixed, trial) == 0 ? 1 : 0;
  }
  const double sigma = std::sqrt(0.25 / n_samples);
  CHECK(std::abs(static_cast<double>(count) / n_samples - 0.5) <= 3 * sigma);

  // same seed, same sequence
  std::vector<std::size_t> seq1, seq2;
  for (int i = 0; i < 50; ++i) {
    RngStream a = RngStream::for_trial(77, i), b = RngStream::for_trial(77, i);
    seq1.push_back(sample_outcome(z_basis, mixed, a));
    seq2.push_back(sample_outcome(z_basis, mixed, b));
  }
  CHECK(seq1 == seq2);
}

TEST_CASE("apply_channel: fixed points and trace preservation") {
  RngStream rng(11, 0);
  Instrument<ComplexMatrix> id_channel;
  id_channel.kind = InstrumentKind::channel;
  id_channel.labels = {"K0"};
  id_channel.operators = {ComplexMatrix::Identity(3, 3)};
  const DensityMatrix rho(random_mixed_state(3, rng));
  CHECK(testing::max_abs_diff(apply_channel(id_channel, rho).mat(), rho.mat()) < 1e-12);

  Instrument<ComplexMatrix> dephase;
  dephase.kind = InstrumentKind::channel;
  for (Eigen::Index k = 0; k < 3; ++k) {
    dephase.labels.push_back("P" + std::to_string(k));
    dephase.operators.push_back(ket_proj(3, k));
  }
  const ComplexMatrix out = apply_channel(dephase, rho).mat();
  CHECK(testing::max_abs_diff(out, rho.mat().diagonal().asDiagonal()) < 1e-12);

  for (Eigen::Index d : {2, 4, 8, 16}) {
    Instrument<ComplexMatrix> chan;
    chan.kind = InstrumentKind::channel;
    for (auto& k : random_povm(d, 3, rng)) {
      chan.labels.push_back("K");
      chan.operators.push_back(std::move(k));
    }
    const DensityMatrix in(random_mixed_state(d, rng));
    const DensityMatrix res = apply_channel(chan, in);
    CHECK(is_hermitian(res.mat(), 1e-10));
    CHECK(min_eigenvalue(res.mat()) >= -1e-10);
    CHECK(std::abs(apply_channel_raw(chan, in.mat()).trace().real() - 1.0) < 1e-12);
  }
}

TEST_CASE("fidelity and trace distance") {
  RngStream rng(13, 0);
  const ComplexMatrix rho = random_mixed_state(4, rng);
  CHECK(fidelity(rho, rho) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(trace_distance(rho, rho) == doctest::Approx(0.0).epsilon(1e-12));

  CHECK(fidelity(ket_proj(2, 0), ket_proj(2, 1)) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(trace_distance(ket_proj(2, 0), ket_proj(2, 1)) == doctest::Approx(1.0).epsilon(1e-12));

  for (int rep = 0; rep < 50; ++rep) {
    const ComplexMatrix a = random_mixed_state(3, rng);
    const ComplexMatrix b = rep % 2 ? random_mixed_state(3, rng) : random_pure_state(3, rng);
    const double f = fidelity(a, b);
    const double t = trace_distance(a, b);
    CHECK(f == doctest::Approx(fidelity(b, a)).epsilon(1e-8));
    CHECK(t == doctest::Approx(trace_distance(b, a)).epsilon(1e-10));
    CHECK(1.0 - f <= t + 1e-10);
  }
}

TEST_CASE("every instrument the validity argument covers passes validation") {
  RngStream rng(17, 0);
  for (int rep = 0; rep < 20; ++rep) {
    const auto d = static_cast<Eigen::Index>(2 + rng.next_u64() % 4);
    const int n = static_cast<int>(1 + rng.next_u64() % 4);
    const double phi = rng.next_double() * std::numbers::pi / 2;
    const ProtocolConfig config = testing::random_config(d, n, phi, 1000 + rep);

    CHECK(validate_instrument(quasi_copy_channel(phi, d), 1e-12).pass);
    CHECK(validate_instrument(outer_measurement(config), 1e-12).pass);
    CHECK(validate_instrument(recovery_instrument(d), 1e-12).pass);
  }
}

TEST_CASE("instrument JSON round trip") {
  RngStream rng(19, 0);
  auto inst = measurement_from(random_povm(3, 2, rng));
  const auto back = instrument_from_json(instrument_to_json(inst));
  CHECK(back.kind == inst.kind);
  CHECK(back.labels == inst.labels);
  for (std::size_t i = 0; i < inst.size(); ++i) {
    CHECK(testing::max_abs_diff(back.operators[i], inst.operators[i]) == 0.0);
  }
  CHECK_THROWS_AS(instrument_from_json({{"kind", "bogus"}, {"operators", nlohmann::json::array()}}),
                  std::invalid_argument);
}
