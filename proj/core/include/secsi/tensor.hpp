#pragma once

#include <secsi/types.hpp>

namespace secsi {

// Dense complex 3-way tensor. Entries are stored in 1-mode vectorization
// order, i.e. the column-major layout of the 1-mode unfolding. With 0-based
// indices, entry (i, j, k) sits at flat position (j*M3 + k)*M1 + i.
//
// Unfolding column order follows the reverse cyclical convention and is
// pinned by the r-mode product identity
//   [T x_r B]_(r) = B * [T]_(r)
// together with
//   [C]_(1) = X1 * [A]_(1) * (X2 kron X3)^T   (and cyclic analogues).
class Tensor3 {
 public:
  Tensor3() : dims_{0, 0, 0} {}
  Tensor3(Index m1, Index m2, Index m3);
  explicit Tensor3(const Dims3& dims) : Tensor3(dims[0], dims[1], dims[2]) {}

  static Tensor3 from_vec1(const Dims3& dims, VectorC data);

  const Dims3& dims() const { return dims_; }
  Index dim(int mode) const { return dims_[mode - 1]; }  // mode in 1..3
  Index size() const { return data_.size(); }

  Complex& operator()(Index i, Index j, Index k) {
    return data_[(j * dims_[2] + k) * dims_[0] + i];
  }
  Complex operator()(Index i, Index j, Index k) const {
    return data_[(j * dims_[2] + k) * dims_[0] + i];
  }

  // 1-mode vectorization (the storage itself).
  const VectorC& vec1() const { return data_; }
  VectorC& vec1() { return data_; }

  // Higher-order norm: Frobenius norm of any unfolding.
  double norm() const { return data_.norm(); }

  Tensor3& operator+=(const Tensor3& other);
  Tensor3& operator-=(const Tensor3& other);
  Tensor3& operator*=(Complex scale);

  friend Tensor3 operator+(Tensor3 a, const Tensor3& b) { return a += b; }
  friend Tensor3 operator-(Tensor3 a, const Tensor3& b) { return a -= b; }
  friend Tensor3 operator*(Complex s, Tensor3 t) { return t *= s; }

 private:
  Dims3 dims_;
  VectorC data_;
};

// r-mode unfolding, mode in 1..3. Row r holds the mode-r fibers; column
// order is fixed by the r-mode product identity (see class comment).
MatrixC unfold(const Tensor3& t, int mode);

// Inverse of unfold: unfold(fold(M, r, dims), r) == M.
Tensor3 fold(const MatrixC& m, int mode, const Dims3& dims);

// T x_r B, requires B.cols() == dim(r).
Tensor3 mode_product(const Tensor3& t, const MatrixC& b, int mode);

// T x_1 B1 x_2 B2 x_3 B3.
Tensor3 multi_mode_product(const Tensor3& t, const MatrixC& b1,
                           const MatrixC& b2, const MatrixC& b3);

// Sum of d rank-one terms: X = I_{3,d} x_1 F1 x_2 F2 x_3 F3.
Tensor3 cp_construct(const MatrixC& f1, const MatrixC& f2, const MatrixC& f3);

// Matlab-style permute(): result dims are dims[order], original mode
// order[t] becomes mode t+1 of the result. order is a permutation of {1,2,3}.
Tensor3 permute_modes(const Tensor3& t, const ModeOrder& order);

double higher_order_norm(const Tensor3& t);

}  // namespace secsi
