#include <secsi/selection.hpp>

#include <limits>
#include <random>
#include <stdexcept>

#include <secsi/linalg.hpp>
#include <secsi/structural.hpp>

namespace secsi {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Column-normalized triple, jointly permuted to match the reference triple.
// One permutation per branch keeps the three factors consistent, so a pure
// combination still describes the same rank-one terms.
FactorTriple align_to_reference(const FactorTriple& ref,
                                const FactorTriple& cand) {
  const Index d = cand.f[0].cols();
  MatrixR corr = MatrixR::Zero(d, d);
  for (int r = 0; r < 3; ++r) {
    for (Index a = 0; a < d; ++a) {
      const double na = ref.f[r].col(a).norm();
      for (Index c = 0; c < d; ++c) {
        const double nc = cand.f[r].col(c).norm();
        if (na > 0.0 && nc > 0.0) {
          corr(a, c) +=
              std::abs((ref.f[r].col(a).adjoint() * cand.f[r].col(c)).value()) /
              (na * nc);
        }
      }
    }
  }
  const auto perm = greedy_assignment(corr);
  FactorTriple out = cand;
  for (int r = 0; r < 3; ++r) {
    for (Index a = 0; a < d; ++a) {
      const double nc = cand.f[r].col(perm[a]).norm();
      if (nc == 0.0) throw std::runtime_error("zero factor column");
      out.f[r].col(a) = cand.f[r].col(perm[a]) / nc;
    }
  }
  return out;
}

}  // namespace

SelectionResult pas_select_from_runs(const Tensor3& x,
                                     const std::vector<BranchRun>& runs,
                                     const NoiseModel& noise) {
  if (runs.empty()) throw std::invalid_argument("no branch runs");
  const NoiseModel unit = noise.scaled_to_unit();

  SelectionResult res;
  res.scheme = "pas";
  std::array<double, 3> best{kInf, kInf, kInf};
  std::array<const BranchRun*, 3> pick{nullptr, nullptr, nullptr};

  for (const auto& run : runs) {
    const BranchRmsfe r = analyze_inputs(analysis_from_run(run), x.dims(), unit);
    for (int f = 0; f < 3; ++f) {
      res.trace.push_back(
          {"f" + std::to_string(f + 1) + ":" + run.branch.str(),
           r.by_factor[f]});
      if (r.by_factor[f] < best[f]) {
        best[f] = r.by_factor[f];
        pick[f] = &run;
      }
    }
  }
  for (int f = 0; f < 3; ++f) {
    if (!pick[f]) throw std::runtime_error("no candidate estimate survived");
    res.chosen[f] = pick[f]->branch;
  }
  res.triple.branch = res.chosen[0];
  for (int f = 0; f < 3; ++f) {
    res.triple.f[f] = pick[f]->to_triple().f[f];
  }
  return res;
}

SelectionResult pas_select(const Tensor3& x, Index rank,
                           const NoiseModel& noise, const JevdOptions& opts) {
  std::vector<BranchFailure> failures;
  const auto runs = run_all_full(x, rank, opts, &failures);
  return pas_select_from_runs(x, runs, noise);
}

SelectionResult bm_select(const Tensor3& x, const SecsiEstimates& estimates) {
  const auto& triples = estimates.triples;
  if (triples.empty()) throw std::invalid_argument("no estimates");
  const Index d = triples[0].f[0].cols();
  const Index n = x.size();

  const FactorTriple* ref = estimates.find(BranchId{3, Side::Rhs});
  if (!ref) ref = &triples.front();

  std::vector<FactorTriple> aligned;
  aligned.reserve(triples.size());
  for (const auto& t : triples) aligned.push_back(align_to_reference(*ref, t));

  SelectionResult res;
  res.scheme = "bm";
  const VectorC& vecx = x.vec1();
  const double xnorm = vecx.norm();
  double best = kInf;
  VectorC best_amp;

  MatrixC basis(n, d);
  for (std::size_t b1 = 0; b1 < aligned.size(); ++b1) {
    for (std::size_t b2 = 0; b2 < aligned.size(); ++b2) {
      for (std::size_t b3 = 0; b3 < aligned.size(); ++b3) {
        for (Index l = 0; l < d; ++l) {
          // 1-mode vectorization of a rank-one term is f2 (x) f3 (x) f1
          basis.col(l) = kron(MatrixC(aligned[b2].f[1].col(l)),
                              MatrixC(kron(MatrixC(aligned[b3].f[2].col(l)),
                                           MatrixC(aligned[b1].f[0].col(l)))));
        }
        const VectorC amp =
            basis.completeOrthogonalDecomposition().solve(vecx);
        const double residual = (vecx - basis * amp).norm() / xnorm;
        res.trace.push_back({triples[b1].branch.str() + "|" +
                                 triples[b2].branch.str() + "|" +
                                 triples[b3].branch.str(),
                             residual});
        if (residual < best) {
          best = residual;
          best_amp = amp;
          res.chosen = {triples[b1].branch, triples[b2].branch,
                        triples[b3].branch};
          res.triple.f[0] = aligned[b1].f[0];
          res.triple.f[1] = aligned[b2].f[1];
          res.triple.f[2] = aligned[b3].f[2];
        }
      }
    }
  }
  if (best_amp.size() == 0) {
    throw std::runtime_error("no finite reconstruction among combinations");
  }
  // fold amplitudes into the third factor
  for (Index l = 0; l < d; ++l) res.triple.f[2].col(l) *= best_amp(l);
  res.triple.branch = res.chosen[0];
  return res;
}

SelectionResult rec_ps_select(const Tensor3& x,
                              const SecsiEstimates& estimates) {
  if (estimates.triples.empty()) throw std::invalid_argument("no estimates");
  SelectionResult res;
  res.scheme = "rec-ps";
  double best = kInf;
  const double xnorm = x.norm();
  for (const auto& t : estimates.triples) {
    const Tensor3 rec = cp_construct(t.f[0], t.f[1], t.f[2]);
    const double residual = (x - rec).norm() / xnorm;
    res.trace.push_back({t.branch.str(), residual});
    if (residual < best) {
      best = residual;
      res.chosen = {t.branch, t.branch, t.branch};
      res.triple = t;
    }
  }
  return res;
}

SelectionResult con_ps_select(const SecsiEstimates& estimates) {
  if (estimates.triples.empty()) throw std::invalid_argument("no estimates");
  SelectionResult res;
  res.scheme = "con-ps";
  double best = kInf;
  for (const auto& t : estimates.triples) {
    res.trace.push_back({t.branch.str(), t.diag.pivot_cond});
    if (t.diag.pivot_cond < best) {
      best = t.diag.pivot_cond;
      res.chosen = {t.branch, t.branch, t.branch};
      res.triple = t;
    }
  }
  return res;
}

SelectionResult dummyr_select(const SecsiEstimates& estimates,
                              std::uint64_t seed) {
  const auto& triples = estimates.triples;
  if (triples.empty()) throw std::invalid_argument("no estimates");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, triples.size() - 1);
  SelectionResult res;
  res.scheme = "dummyr";
  for (int f = 0; f < 3; ++f) {
    const auto& t = triples[pick(rng)];
    res.chosen[f] = t.branch;
    res.triple.f[f] = t.f[f];
    res.trace.push_back({"f" + std::to_string(f + 1) + ":" + t.branch.str(),
                         0.0});
  }
  res.triple.branch = res.chosen[0];
  return res;
}

}  // namespace secsi
