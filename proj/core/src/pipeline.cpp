#include <secsi/pipeline.hpp>

#include <algorithm>
#include <stdexcept>

#include <secsi/linalg.hpp>
#include <secsi/structural.hpp>

namespace secsi {

std::string BranchId::str() const {
  return std::to_string(mode) + (side == Side::Rhs ? "-rhs" : "-lhs");
}

BranchId BranchId::parse(const std::string& s) {
  if (s.size() == 5 && s[1] == '-' && s[0] >= '1' && s[0] <= '3') {
    const std::string tail = s.substr(2);
    if (tail == "rhs") return {s[0] - '0', Side::Rhs};
    if (tail == "lhs") return {s[0] - '0', Side::Lhs};
  }
  throw std::invalid_argument("bad branch id '" + s +
                              "' (expected <mode>-<rhs|lhs>)");
}

std::array<BranchId, 6> BranchId::all() {
  return {BranchId{1, Side::Rhs}, BranchId{1, Side::Lhs},
          BranchId{2, Side::Rhs}, BranchId{2, Side::Lhs},
          BranchId{3, Side::Rhs}, BranchId{3, Side::Lhs}};
}

ModeOrder branch_order(int mode) {
  switch (mode) {
    case 1:
      return {2, 3, 1};
    case 2:
      return {1, 3, 2};
    case 3:
      return {1, 2, 3};
    default:
      throw std::invalid_argument("branch mode must be 1, 2 or 3");
  }
}

const FactorTriple* SecsiEstimates::find(const BranchId& b) const {
  for (const auto& t : triples) {
    if (t.branch == b) return &t;
  }
  return nullptr;
}

std::vector<MatrixC> slices_of(const Tensor3& expanded) {
  const auto [d1, d2, m] = expanded.dims();
  if (d1 != d2) {
    throw std::invalid_argument("expanded core must have square slices");
  }
  std::vector<MatrixC> out(m, MatrixC(d1, d2));
  for (Index k = 0; k < m; ++k)
    for (Index j = 0; j < d2; ++j)
      for (Index i = 0; i < d1; ++i) out[k](i, j) = expanded(i, j, k);
  return out;
}

int select_pivot(const std::vector<MatrixC>& slices) {
  if (slices.empty()) throw std::invalid_argument("no slices");
  int best = -1;
  double best_cond = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < slices.size(); ++k) {
    const double c = cond2(slices[k]);
    if (c <= 1e12 && c < best_cond) {
      best_cond = c;
      best = static_cast<int>(k);
    }
  }
  if (best < 0) {
    throw std::runtime_error("all core slices are numerically singular");
  }
  return best;
}

std::vector<MatrixC> build_rhs_set(const std::vector<MatrixC>& slices, int p) {
  Eigen::FullPivLU<MatrixC> lu(slices.at(p));
  if (!lu.isInvertible()) throw std::runtime_error("pivot slice is singular");
  const MatrixC pinv_right = lu.inverse();
  std::vector<MatrixC> out;
  out.reserve(slices.size());
  for (const auto& s : slices) out.push_back(s * pinv_right);
  return out;
}

std::vector<MatrixC> build_lhs_set(const std::vector<MatrixC>& slices, int p) {
  Eigen::FullPivLU<MatrixC> lu(slices.at(p));
  if (!lu.isInvertible()) throw std::runtime_error("pivot slice is singular");
  std::vector<MatrixC> out;
  out.reserve(slices.size());
  for (const auto& s : slices) out.push_back(lu.solve(s).transpose());
  return out;
}

MatrixC ls_fit_factor(const Tensor3& x, int mode, const MatrixC& fa,
                      const MatrixC& fb) {
  const MatrixC k = khatri_rao(fa, fb);
  Eigen::CompleteOrthogonalDecomposition<MatrixC> cod(k);
  if (cod.rank() < k.cols()) {
    throw std::runtime_error("Khatri-Rao factor is rank deficient");
  }
  return cod.solve(unfold(x, mode).transpose()).transpose();
}

FactorTriple BranchRun::to_triple() const {
  FactorTriple t;
  t.branch = branch;
  for (int slot = 0; slot < 3; ++slot) {
    t.f[order[slot] - 1] = f_slot[slot];
  }
  t.diag.pivot = pivot;
  t.diag.pivot_cond = pivot_cond;
  t.diag.jevd_residual = jevd.residual;
  t.diag.jevd_sweeps = jevd.sweeps;
  t.diag.jevd_converged = jevd.converged;
  return t;
}

PreparedMode prepare_mode(const Tensor3& x, Index rank, int mode) {
  const auto dims = x.dims();
  const Index min_dim = std::min({dims[0], dims[1], dims[2]});
  if (rank < 1 || rank > min_dim) {
    throw std::invalid_argument(
        "rank must satisfy 1 <= d <= min(M_r) (non-degenerate case)");
  }
  PreparedMode pm;
  pm.mode = mode;
  pm.order = branch_order(mode);
  pm.x_slot = permute_modes(x, pm.order);
  pm.hosvd = truncated_hosvd(pm.x_slot, rank);
  pm.expanded = expanded_core(pm.hosvd, 3);
  pm.slices = slices_of(pm.expanded);
  pm.pivot = select_pivot(pm.slices);
  pm.pivot_cond = cond2(pm.slices[pm.pivot]);
  return pm;
}

BranchRun run_prepared(const PreparedMode& pm, Side side,
                       const JevdOptions& opts) {
  BranchRun run;
  run.branch = BranchId{pm.mode, side};
  run.order = pm.order;
  run.slot_dims = pm.x_slot.dims();
  run.x_slot = pm.x_slot;
  run.hosvd = pm.hosvd;
  run.slices = pm.slices;
  run.pivot = pm.pivot;
  run.pivot_cond = pm.pivot_cond;

  run.jevd_set = (side == Side::Rhs) ? build_rhs_set(pm.slices, pm.pivot)
                                     : build_lhs_set(pm.slices, pm.pivot);
  run.jevd = solve_jevd(run.jevd_set, opts);

  const MatrixC& t = run.jevd.transform;
  const MatrixC f3 = run.jevd.eigenvalues;  // row k == diag(D_k)
  if (side == Side::Rhs) {
    run.f_slot[0] = pm.hosvd.modes[0].u_signal * t;
    run.f_slot[2] = f3;
    run.f_slot[1] = ls_fit_factor(pm.x_slot, 2, run.f_slot[2], run.f_slot[0]);
  } else {
    run.f_slot[1] = pm.hosvd.modes[1].u_signal * t;
    run.f_slot[2] = f3;
    run.f_slot[0] = ls_fit_factor(pm.x_slot, 1, run.f_slot[1], run.f_slot[2]);
  }
  return run;
}

BranchRun run_branch_full(const Tensor3& x, Index rank, BranchId branch,
                          const JevdOptions& opts) {
  return run_prepared(prepare_mode(x, rank, branch.mode), branch.side, opts);
}

FactorTriple run_branch(const Tensor3& x, Index rank, BranchId branch,
                        const JevdOptions& opts) {
  return run_branch_full(x, rank, branch, opts).to_triple();
}

std::vector<BranchRun> run_all_full(const Tensor3& x, Index rank,
                                    const JevdOptions& opts,
                                    std::vector<BranchFailure>* failures) {
  std::vector<BranchRun> runs;
  for (int mode = 1; mode <= 3; ++mode) {
    std::optional<PreparedMode> pm;
    try {
      pm = prepare_mode(x, rank, mode);
    } catch (const std::exception& e) {
      if (failures) {
        failures->push_back({BranchId{mode, Side::Rhs}, e.what()});
        failures->push_back({BranchId{mode, Side::Lhs}, e.what()});
      }
      continue;
    }
    for (Side side : {Side::Rhs, Side::Lhs}) {
      try {
        runs.push_back(run_prepared(*pm, side, opts));
      } catch (const std::exception& e) {
        if (failures) failures->push_back({BranchId{mode, side}, e.what()});
      }
    }
  }
  return runs;
}

SecsiEstimates run_all(const Tensor3& x, Index rank, const JevdOptions& opts) {
  SecsiEstimates est;
  const auto runs = run_all_full(x, rank, opts, &est.failures);
  est.triples.reserve(runs.size());
  for (const auto& r : runs) est.triples.push_back(r.to_triple());
  return est;
}

}  // namespace secsi
