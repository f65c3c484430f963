#pragma once

#include <optional>
#include <string>
#include <vector>

#include <secsi/jevd.hpp>
#include <secsi/subspace.hpp>

namespace secsi {

enum class Side { Rhs, Lhs };

// One of the six solution paths. `mode` names the original mode that sits in
// the third (expanded) position after reordering: mode 1 uses
// permute(X,[2,3,1]), mode 2 uses permute(X,[1,3,2]), mode 3 runs as-is.
struct BranchId {
  int mode = 3;
  Side side = Side::Rhs;

  std::string str() const;
  static BranchId parse(const std::string& s);
  static std::array<BranchId, 6> all();

  friend bool operator==(const BranchId& a, const BranchId& b) {
    return a.mode == b.mode && a.side == b.side;
  }
};

// Reordering that puts the given original mode third.
ModeOrder branch_order(int mode);

struct BranchDiagnostics {
  int pivot = -1;             // 0-based slice index
  double pivot_cond = 0.0;
  double jevd_residual = 0.0;
  int jevd_sweeps = 0;
  bool jevd_converged = false;
};

struct FactorTriple {
  std::array<MatrixC, 3> f;   // f[r-1] is M_r x d, original mode order
  BranchId branch;
  BranchDiagnostics diag;
};

struct BranchFailure {
  BranchId branch;
  std::string reason;
};

struct SecsiEstimates {
  std::vector<FactorTriple> triples;
  std::vector<BranchFailure> failures;

  const FactorTriple* find(const BranchId& b) const;
};

// Slices along the expanded third mode of a d x d x M core.
std::vector<MatrixC> slices_of(const Tensor3& expanded);

// Index of the slice with the lowest 2-norm condition number; slices with
// cond > 1e12 are excluded, ties break toward the smaller index.
int select_pivot(const std::vector<MatrixC>& slices);

std::vector<MatrixC> build_rhs_set(const std::vector<MatrixC>& slices, int p);
std::vector<MatrixC> build_lhs_set(const std::vector<MatrixC>& slices, int p);

// Least-squares factor fit: minimizes ||[X]_(r) - F * (Fa krp Fb)^T||_F where
// (Fa, Fb) are the cyclic companions of mode r, e.g. r=2 takes (F3, F1).
MatrixC ls_fit_factor(const Tensor3& x, int mode, const MatrixC& fa,
                      const MatrixC& fb);

// Everything one branch produces, kept in the reordered (slot) frame where
// the branch's expanded mode is third. Slot t holds original mode order[t].
struct BranchRun {
  BranchId branch;
  ModeOrder order;
  Dims3 slot_dims;
  Tensor3 x_slot;
  TruncatedHosvd hosvd;
  std::vector<MatrixC> slices;
  int pivot = -1;
  double pivot_cond = 0.0;
  std::vector<MatrixC> jevd_set;
  JevdSolution jevd;
  std::array<MatrixC, 3> f_slot;

  FactorTriple to_triple() const;
};

// Shared per-mode work (reorder + HOSVD + slices + pivot) reused by the rhs
// and lhs branches of that mode.
struct PreparedMode {
  int mode = 3;
  ModeOrder order;
  Tensor3 x_slot;
  TruncatedHosvd hosvd;
  Tensor3 expanded;
  std::vector<MatrixC> slices;
  int pivot = -1;
  double pivot_cond = 0.0;
};

PreparedMode prepare_mode(const Tensor3& x, Index rank, int mode);
BranchRun run_prepared(const PreparedMode& pm, Side side,
                       const JevdOptions& opts = {});

BranchRun run_branch_full(const Tensor3& x, Index rank, BranchId branch,
                          const JevdOptions& opts = {});
FactorTriple run_branch(const Tensor3& x, Index rank, BranchId branch,
                        const JevdOptions& opts = {});

std::vector<BranchRun> run_all_full(const Tensor3& x, Index rank,
                                    const JevdOptions& opts = {},
                                    std::vector<BranchFailure>* failures = nullptr);
SecsiEstimates run_all(const Tensor3& x, Index rank,
                       const JevdOptions& opts = {});

}  // namespace secsi
