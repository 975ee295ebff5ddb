// This code is licensed under the Apache License, Version 2.0. You may
// obtain a copy of this license at http://www.apache.org/licenses/LICENSE-2.0.

#ifndef QSR_BLOCKALG_HPP
#define QSR_BLOCKALG_HPP

#include <stdexcept>
#include <utility>

#include "qsr/matrix.hpp"

namespace qsr {

/// Operator on H_d (+) H_d_perp stored as four d x d blocks.
///
/// The two diagonal blocks (A acting on H_d, B on the complement) form the
/// direct-sum part; the two off-diagonal blocks (C mapping the complement
/// into H_d, D the other way) form the box-plus part. Presence of each part
/// is tracked structurally so that products of pure direct-sum and pure
/// box-plus operators keep their zero blocks exactly zero, not merely small.
///
/// Dense layout on the flattened 2d space: indices 0..d-1 span H_d,
/// d..2d-1 span the complement.
class BlockOperator {
 public:
  /// A (+) B, block-diagonal.
  static BlockOperator direct_sum(ComplexMatrix a, ComplexMatrix b) {
    check_square_same(a, b);
    BlockOperator x(a.rows());
    x.diag_top_ = std::move(a);
    x.diag_bot_ = std::move(b);
    x.has_diag_ = true;
    return x;
  }

  /// C [+] D, block off-diagonal.
  static BlockOperator box_plus(ComplexMatrix c, ComplexMatrix d) {
    check_square_same(c, d);
    BlockOperator x(c.rows());
    x.off_top_ = std::move(c);
    x.off_bot_ = std::move(d);
    x.has_off_ = true;
    return x;
  }

  static BlockOperator identity(Eigen::Index d) {
    return direct_sum(ComplexMatrix::Identity(d, d), ComplexMatrix::Identity(d, d));
  }

  static BlockOperator zero(Eigen::Index d) { return BlockOperator(d); }

  Eigen::Index dim() const { return dim_; }
  bool has_diag_part() const { return has_diag_; }
  bool has_off_part() const { return has_off_; }

  const ComplexMatrix& diag_top() const { return has_diag_ ? diag_top_ : zero_block(); }
  const ComplexMatrix& diag_bot() const { return has_diag_ ? diag_bot_ : zero_block(); }
  const ComplexMatrix& off_top() const { return has_off_ ? off_top_ : zero_block(); }
  const ComplexMatrix& off_bot() const { return has_off_ ? off_bot_ : zero_block(); }

  friend BlockOperator operator*(const BlockOperator& x, const BlockOperator& y) {
    if (x.dim_ != y.dim_) throw std::invalid_argument("BlockOperator: dimension mismatch");
    BlockOperator r(x.dim_);
    // (A(+)B)(C(+)D) = AC (+) BD        (A[+]B)(C[+]D) = AD (+) BC
    if (x.has_diag_ && y.has_diag_) {
      r.accum_diag(x.diag_top_ * y.diag_top_, x.diag_bot_ * y.diag_bot_);
    }
    if (x.has_off_ && y.has_off_) {
      r.accum_diag(x.off_top_ * y.off_bot_, x.off_bot_ * y.off_top_);
    }
    // (A(+)B)(C[+]D) = AC [+] BD        (A[+]B)(C(+)D) = AD [+] BC
    if (x.has_diag_ && y.has_off_) {
      r.accum_off(x.diag_top_ * y.off_top_, x.diag_bot_ * y.off_bot_);
    }
    if (x.has_off_ && y.has_diag_) {
      r.accum_off(x.off_top_ * y.diag_bot_, x.off_bot_ * y.diag_top_);
    }
    return r;
  }

  friend BlockOperator operator+(const BlockOperator& x, const BlockOperator& y) {
    if (x.dim_ != y.dim_) throw std::invalid_argument("BlockOperator: dimension mismatch");
    BlockOperator r(x.dim_);
    if (x.has_diag_) r.accum_diag(x.diag_top_, x.diag_bot_);
    if (y.has_diag_) r.accum_diag(y.diag_top_, y.diag_bot_);
    if (x.has_off_) r.accum_off(x.off_top_, x.off_bot_);
    if (y.has_off_) r.accum_off(y.off_top_, y.off_bot_);
    return r;
  }

  friend BlockOperator operator*(const Complex& s, const BlockOperator& x) {
    BlockOperator r(x.dim_);
    if (x.has_diag_) r.accum_diag(s * x.diag_top_, s * x.diag_bot_);
    if (x.has_off_) r.accum_off(s * x.off_top_, s * x.off_bot_);
    return r;
  }
  friend BlockOperator operator*(const BlockOperator& x, const Complex& s) { return s * x; }

  /// (A(+)B)^dag = A^dag (+) B^dag; (C[+]D)^dag = D^dag [+] C^dag.
  BlockOperator adjoint() const {
    BlockOperator r(dim_);
    if (has_diag_) r.accum_diag(diag_top_.adjoint(), diag_bot_.adjoint());
    if (has_off_) r.accum_off(off_bot_.adjoint(), off_top_.adjoint());
    return r;
  }

  /// tr(A(+)B) = tr A + tr B; box-plus blocks contribute nothing.
  Complex trace() const { return has_diag_ ? diag_top_.trace() + diag_bot_.trace() : Complex(0); }

  ComplexMatrix to_dense() const {
    ComplexMatrix m = ComplexMatrix::Zero(2 * dim_, 2 * dim_);
    if (has_diag_) {
      m.topLeftCorner(dim_, dim_) = diag_top_;
      m.bottomRightCorner(dim_, dim_) = diag_bot_;
    }
    if (has_off_) {
      m.topRightCorner(dim_, dim_) = off_top_;
      m.bottomLeftCorner(dim_, dim_) = off_bot_;
    }
    return m;
  }

  static BlockOperator from_dense(const ComplexMatrix& m) {
    if (m.rows() != m.cols()) throw std::invalid_argument("from_dense: matrix not square");
    if (m.rows() % 2 != 0) throw std::invalid_argument("from_dense: odd dimension");
    const Eigen::Index d = m.rows() / 2;
    BlockOperator r(d);
    ComplexMatrix dt = m.topLeftCorner(d, d), db = m.bottomRightCorner(d, d);
    ComplexMatrix ot = m.topRightCorner(d, d), ob = m.bottomLeftCorner(d, d);
    if (!dt.isZero(0.0) || !db.isZero(0.0)) r.accum_diag(std::move(dt), std::move(db));
    if (!ot.isZero(0.0) || !ob.isZero(0.0)) r.accum_off(std::move(ot), std::move(ob));
    return r;
  }

  bool is_hermitian(double tol = 1e-10) const {
    if (has_diag_ && (!qsr::is_hermitian(diag_top_, tol) || !qsr::is_hermitian(diag_bot_, tol)))
      return false;
    if (has_off_ && (off_top_ - off_bot_.adjoint()).cwiseAbs().maxCoeff() > tol) return false;
    return true;
  }

  /// Eigenvalue positivity check; requires a Hermitian operator.
  bool is_positive(double tol = 1e-10) const {
    if (!is_hermitian(tol)) throw std::invalid_argument("is_positive: operator not Hermitian");
    if (!has_off_) {
      return !has_diag_ || (min_eigenvalue(diag_top_) >= -tol && min_eigenvalue(diag_bot_) >= -tol);
    }
    return min_eigenvalue(to_dense()) >= -tol;
  }

  nlohmann::json to_json() const {
    nlohmann::json j{{"dim", dim_}};
    if (has_diag_) {
      j["diag_top"] = matrix_to_json(diag_top_);
      j["diag_bot"] = matrix_to_json(diag_bot_);
    }
    if (has_off_) {
      j["off_top"] = matrix_to_json(off_top_);
      j["off_bot"] = matrix_to_json(off_bot_);
    }
    return j;
  }

  static BlockOperator from_json(const nlohmann::json& j) {
    const auto d = j.at("dim").get<Eigen::Index>();
    BlockOperator r(d);
    auto block = [&](const char* key) {
      ComplexMatrix m = j.contains(key) ? matrix_from_json(j.at(key)) : ComplexMatrix::Zero(d, d);
      if (m.rows() != d || m.cols() != d)
        throw std::invalid_argument("BlockOperator::from_json: block has wrong dimension");
      return m;
    };
    if (j.contains("diag_top") || j.contains("diag_bot")) r.accum_diag(block("diag_top"), block("diag_bot"));
    if (j.contains("off_top") || j.contains("off_bot")) r.accum_off(block("off_top"), block("off_bot"));
    return r;
  }

 private:
  explicit BlockOperator(Eigen::Index d) : dim_(d) {
    if (d <= 0) throw std::invalid_argument("BlockOperator: dimension must be positive");
  }

  static void check_square_same(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (a.rows() != a.cols() || b.rows() != b.cols() || a.rows() != b.rows()) {
      throw std::invalid_argument("BlockOperator: blocks must be square and same-dimensional");
    }
  }

  void accum_diag(ComplexMatrix top, ComplexMatrix bot) {
    if (has_diag_) {
      diag_top_ += top;
      diag_bot_ += bot;
    } else {
      diag_top_ = std::move(top);
      diag_bot_ = std::move(bot);
      has_diag_ = true;
    }
  }
  void accum_off(ComplexMatrix top, ComplexMatrix bot) {
    if (has_off_) {
      off_top_ += top;
      off_bot_ += bot;
    } else {
      off_top_ = std::move(top);
      off_bot_ = std::move(bot);
      has_off_ = true;
    }
  }

  const ComplexMatrix& zero_block() const {
    if (zero_.rows() != dim_) zero_ = ComplexMatrix::Zero(dim_, dim_);
    return zero_;
  }

  Eigen::Index dim_;
  ComplexMatrix diag_top_, diag_bot_, off_top_, off_bot_;
  bool has_diag_ = false, has_off_ = false;
  mutable ComplexMatrix zero_;
};

// Operator-carrier surface used by the generic instrument machinery in qcore.
inline BlockOperator identity_like(const BlockOperator& x) {
  return BlockOperator::identity(x.dim());
}
inline ComplexMatrix dense_form(const BlockOperator& x) { return x.to_dense(); }
inline Complex op_trace(const BlockOperator& x) { return x.trace(); }
inline Eigen::Index op_dim(const BlockOperator& x) { return x.dim(); }

inline BlockOperator block_mul(const BlockOperator& x, const BlockOperator& y) { return x * y; }
inline BlockOperator block_add(const BlockOperator& x, const BlockOperator& y) { return x + y; }
inline BlockOperator block_adjoint(const BlockOperator& x) { return x.adjoint(); }
inline Complex block_trace(const BlockOperator& x) { return x.trace(); }
inline bool is_positive(const BlockOperator& x, double tol = 1e-10) { return x.is_positive(tol); }

}  // namespace qsr

#endif  // QSR_BLOCKALG_HPP
