#pragma once

#include <cstdint>
#include <string>

#include <secsi/perturbation.hpp>

namespace secsi {

struct ScoreEntry {
  std::string label;  // "f1:3-rhs" (per-factor), "3-rhs|1-lhs|2-rhs" (combos)
  double score = 0.0;
};

struct SelectionResult {
  std::string scheme;
  std::array<BranchId, 3> chosen;  // branch supplying each factor
  FactorTriple triple;
  std::vector<ScoreEntry> trace;
};

// Performance-analysis based selection: per factor, the branch minimizing
// the plug-in closed-form rMSFE. The noise statistics are normalized to unit
// scale first, so the choice is invariant to the supplied variance.
SelectionResult pas_select(const Tensor3& x, Index rank,
                           const NoiseModel& noise,
                           const JevdOptions& opts = {});
// Same, reusing branch runs that already exist.
SelectionResult pas_select_from_runs(const Tensor3& x,
                                     const std::vector<BranchRun>& runs,
                                     const NoiseModel& noise);

// Exhaustive best-matching: scores all 6^3 cross-branch factor combinations
// by relative reconstruction residual after per-component amplitude fitting.
SelectionResult bm_select(const Tensor3& x, const SecsiEstimates& estimates);

// Reconstruction-error over the 6 complete branch triples.
SelectionResult rec_ps_select(const Tensor3& x, const SecsiEstimates& estimates);

// Branch with the best-conditioned pivot slice.
SelectionResult con_ps_select(const SecsiEstimates& estimates);

// Uniformly random branch per factor (naive baseline).
SelectionResult dummyr_select(const SecsiEstimates& estimates,
                              std::uint64_t seed);

}  // namespace secsi
