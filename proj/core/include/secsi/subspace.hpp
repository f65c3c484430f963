#pragma once

#include <secsi/tensor.hpp>

namespace secsi {

// Signal/noise partition of the SVD of one r-mode unfolding.
//
// Sign convention: every left singular vector is scaled so that its
// largest-magnitude entry is real positive (the matching right singular
// vector carries the conjugate phase), which makes repeated runs and
// perturbed/unperturbed comparisons share a basis.
struct ModeSubspace {
  MatrixC u_signal;        // M_r x d
  MatrixC u_noise;         // M_r x (M_r - d)
  VectorR sigma_signal;    // d, strictly positive, nonincreasing
  MatrixC v_signal;        // (prod of other dims) x d
  MatrixC noise_projector; // Gamma = U_n U_n^H
  double gap_ratio;        // sigma_d / sigma_{d+1}, +inf when no tail
  bool weak_gap;           // gap_ratio < 10, reported, never fatal
};

ModeSubspace mode_svd_partition(const Tensor3& t, int mode, Index rank);

struct TruncatedHosvd {
  std::array<ModeSubspace, 3> modes;
  Tensor3 core;  // d x d x d
  Index rank;
};

// Truncated HOSVD: per-mode dominant subspaces plus the core
// X x_1 U1^H x_2 U2^H x_3 U3^H.
TruncatedHosvd truncated_hosvd(const Tensor3& t, Index rank);

// Core with one mode expanded back: core x_r U_r.
Tensor3 expanded_core(const TruncatedHosvd& h, int mode);

// Low-rank reconstruction core x_1 U1 x_2 U2 x_3 U3.
Tensor3 hosvd_reconstruct(const TruncatedHosvd& h);

}  // namespace secsi
