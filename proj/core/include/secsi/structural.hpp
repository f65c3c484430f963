#pragma once

#include <secsi/types.hpp>

namespace secsi {

using Permutation = Eigen::PermutationMatrix<Eigen::Dynamic, Eigen::Dynamic, Index>;

MatrixC kron(const MatrixC& a, const MatrixC& b);

// Column-wise Kronecker product; requires equal column counts.
MatrixC khatri_rao(const MatrixC& a, const MatrixC& b);

// r-to-1 mode permutation P with vec{[Z]_(r)} == P * vec{[Z]_(1)} for every
// tensor Z of the given dims. P^(1) is the identity.
Permutation perm_r_to_1(const Dims3& dims, int mode);

// Transposition permutation Q with vec{Z^T} == Q * vec{Z} for Z of shape
// rows x cols.
Permutation perm_transpose(Index rows, Index cols);

// Permutation carrying the 1-mode vectorization of Z to the 1-mode
// vectorization of permute_modes(Z, order).
Permutation perm_reorder_vec1(const Dims3& dims, const ModeOrder& order);

// Selection matrices on vec{Z} for square Z of size d:
//   vec_off_selector(d)   * vec{Z} == vec{Off(Z)}        (d^2 x d^2)
//   vec_ddiag_selector(d) * vec{Z} == vec{Ddiag(Z)}      (d^2 x d^2)
//   diag_extract_selector(d) * vec{Z} == diag(Z)         (d   x d^2)
MatrixC vec_off_selector(Index d);
MatrixC vec_ddiag_selector(Index d);
MatrixC diag_extract_selector(Index d);

// Vectorization operators for Khatri-Rao products with one factor fixed:
//   vec{X krp Y} == krp_vec_fixed_left(X, rows(Y))  * vec{Y}
//   vec{X krp Y} == krp_vec_fixed_right(Y, rows(X)) * vec{X}
MatrixC krp_vec_fixed_left(const MatrixC& x, Index rows_y);
MatrixC krp_vec_fixed_right(const MatrixC& y, Index rows_x);

}  // namespace secsi
