// This code is licensed under the Apache License, Version 2.0. You may
// obtain a copy of this license at http://www.apache.org/licenses/LICENSE-2.0.

#ifndef QSR_SAMPLING_HPP
#define QSR_SAMPLING_HPP

#include <stdexcept>
#include <vector>

#include "qsr/matrix.hpp"
#include "qsr/rng.hpp"

namespace qsr {

/// d x d matrix of iid standard complex Gaussians.
inline ComplexMatrix ginibre(Eigen::Index rows, Eigen::Index cols, RngStream& rng) {
  ComplexMatrix g(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) {
      g(r, c) = Complex(rng.next_gaussian(), rng.next_gaussian());
    }
  }
  return g;
}

/// Haar-distributed unitary via QR of a Ginibre matrix with phase fixing.
inline ComplexMatrix haar_unitary(Eigen::Index d, RngStream& rng) {
  const ComplexMatrix g = ginibre(d, d, rng);
  Eigen::HouseholderQR<ComplexMatrix> qr(g);
  ComplexMatrix q = qr.householderQ();
  const ComplexMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index i = 0; i < d; ++i) {
    const Complex rii = r(i, i);
    q.col(i) *= rii / std::abs(rii);
  }
  return q;
}

/// Haar-random pure state as a density matrix.
inline ComplexMatrix random_pure_state(Eigen::Index d, RngStream& rng) {
  ComplexVector v = ginibre(d, 1, rng);
  v.normalize();
  return v * v.adjoint();
}

/// Full-rank mixed state from a normalized Wishart form G G^dag / tr.
inline ComplexMatrix random_mixed_state(Eigen::Index d, RngStream& rng) {
  const ComplexMatrix g = ginibre(d, d, rng);
  ComplexMatrix w = g * g.adjoint();
  return w / w.trace().real();
}

inline ComplexMatrix maximally_mixed_state(Eigen::Index d) {
  return ComplexMatrix::Identity(d, d) / static_cast<double>(d);
}

/// n Ginibre draws G_nu normalized to M_nu = G_nu (sum G^dag G)^{-1/2},
/// a complete measurement family.
inline std::vector<ComplexMatrix> random_povm(Eigen::Index d, int n, RngStream& rng) {
  if (n < 1) throw std::invalid_argument("random_povm: need at least one outcome");
  std::vector<ComplexMatrix> gs;
  ComplexMatrix s = ComplexMatrix::Zero(d, d);
  for (int nu = 0; nu < n; ++nu) {
    gs.push_back(ginibre(d, d, rng));
    s += gs.back().adjoint() * gs.back();
  }
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(s);
  const ComplexMatrix inv_sqrt = es.eigenvectors() *
                                 es.eigenvalues().cwiseInverse().cwiseSqrt().asDiagonal() *
                                 es.eigenvectors().adjoint();
  for (auto& g : gs) g = g * inv_sqrt;
  return gs;
}

/// Rank-deficient projective family: eigenprojectors of a Haar-rotated basis
/// partitioned round-robin into n groups. Requires n <= d; every operator has
/// min eigenvalue 0 when n >= 2.
inline std::vector<ComplexMatrix> projective_family(Eigen::Index d, int n, RngStream& rng) {
  if (n < 1 || n > d) throw std::invalid_argument("projective_family: need 1 <= n <= d");
  const ComplexMatrix u = haar_unitary(d, rng);
  std::vector<ComplexMatrix> ms(n, ComplexMatrix::Zero(d, d));
  for (Eigen::Index i = 0; i < d; ++i) {
    ms[i % n] += u.col(i) * u.col(i).adjoint();
  }
  return ms;
}

}  // namespace qsr

#endif  // QSR_SAMPLING_HPP
