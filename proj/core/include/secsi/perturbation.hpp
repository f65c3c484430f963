#pragma once

#include <optional>

#include <secsi/pipeline.hpp>
#include <secsi/structural.hpp>

namespace secsi {

// Second-order noise statistics in 1-mode vectorization coordinates.
// The pseudo-covariance is carried for completeness; the closed-form error
// expressions consume the covariance only.
struct NoiseModel {
  bool white = true;
  double sigma2 = 1.0;
  MatrixC covariance;  // R_nn^(1), used when white == false
  std::optional<MatrixC> pseudo_covariance;  // C_nn^(1)

  static NoiseModel white_noise(double sigma2);
  static NoiseModel colored(MatrixC r, std::optional<MatrixC> c = {});

  // Hermitian/PSD sanity check against the expected total entry count.
  void validate(Index total_entries) const;

  // Covariance of P * n_1 for a 0/1 permutation P (mode reordering or
  // r-to-1 permutation): P R P^T.
  NoiseModel permuted(const Permutation& p) const;

  // Same statistics scaled so the mean diagonal is one. Selection schemes
  // use this; the argmin is invariant to positive scaling of R.
  NoiseModel scaled_to_unit() const;
};

// Reference quantities one branch analysis needs, all in the slot frame
// (expanded mode third). Sourced either from the true factors of a noiseless
// tensor or from a noisy pipeline run (plug-in analysis).
struct AnalysisInputs {
  BranchId branch;
  Index rank = 0;
  Dims3 slot_dims{};
  TruncatedHosvd hosvd;
  std::vector<MatrixC> slices;
  int pivot = -1;
  std::vector<MatrixC> jevd_set;   // rhs or lhs set of the slices
  MatrixC transform;               // T1 (rhs) or T2 (lhs)
  MatrixC d_eig;                   // K x d, row k == diag(D_k)
  std::array<MatrixC, 3> f_slot;   // factor matrices, slot order
};

AnalysisInputs analysis_from_factors(const Tensor3& x0, Index rank,
                                     BranchId branch,
                                     const std::array<MatrixC, 3>& factors);
AnalysisInputs analysis_from_run(const BranchRun& run);

// First-order operators mapping the 1-mode noise vector n_1 (slot frame) to
// each vectorized perturbation of the branch pipeline.
struct LChain {
  std::array<MatrixC, 3> du;  // vec{dU_r}
  MatrixC l0;                 // vec{[dS]_(1)}
  MatrixC l1;                 // vec{[dS_3]_(1)}
  std::vector<MatrixC> l2;    // vec{dS_{3,k}}
  std::vector<MatrixC> l3;    // vec{dS_{3,k}^{rhs|lhs}}
  MatrixC l3_stacked;
  MatrixC b0;                 // Off-projected similarity of one slice update
  MatrixC a;                  // stacked JEVD normal operator
  MatrixC l4;                 // vec{dT}
  std::vector<MatrixC> l4k;   // row k of dF3 (as a column)
  MatrixC l5;                 // vec{dF3}
  MatrixC l6;                 // vec{dF1}
  MatrixC l7;                 // vec{dF2}
  std::array<MatrixC, 3> lf;  // factor residual operators after optimal scaling
  double a_condition = 0.0;   // sigma_max/sigma_cut of A's pseudo-inverse
};

LChain build_l_chain(const AnalysisInputs& in);

// tr(L R L^H) / ||F||_F^2.
double rmsfe_closed_form(const MatrixC& lf, const NoiseModel& noise,
                         const MatrixC& factor);

struct BranchRmsfe {
  BranchId branch;
  std::array<double, 3> by_factor{};  // indexed by original mode - 1
};

// Noise is given in the ORIGINAL frame; it is permuted into the slot frame
// internally (white noise is untouched).
BranchRmsfe analyze_inputs(const AnalysisInputs& in, const Dims3& orig_dims,
                           const NoiseModel& noise);

BranchRmsfe analyze_branch(const Tensor3& x0,
                           const std::array<MatrixC, 3>& factors,
                           BranchId branch, const NoiseModel& noise);
BranchRmsfe analyze_branch_plugin(const Tensor3& x, Index rank,
                                  BranchId branch, const NoiseModel& noise,
                                  const JevdOptions& opts = {});

std::vector<BranchRmsfe> analyze_all(const Tensor3& x0,
                                     const std::array<MatrixC, 3>& factors,
                                     const NoiseModel& noise);
std::vector<BranchRmsfe> analyze_all_plugin(const Tensor3& x, Index rank,
                                            const NoiseModel& noise,
                                            const JevdOptions& opts = {});

// Optimal diagonal scaling resolving the column-scale ambiguity of an
// estimate zhat of z: P = Ddiag(Z^H Zhat K^{-1})^{-1}, K = Ddiag(Z^H Z).
// Returns the diagonal. Throws when a column of z is zero or orthogonal to
// its estimate.
VectorC theorem1_scaling(const MatrixC& z, const MatrixC& zhat);

}  // namespace secsi
