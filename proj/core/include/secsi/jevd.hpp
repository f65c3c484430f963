#pragma once

#include <cstdint>
#include <vector>

#include <secsi/types.hpp>

namespace secsi {

struct JevdOptions {
  int max_sweeps = 100;
  double tol = 1e-12;  // relative to sum of squared slice norms
  std::uint64_t seed = 0;  // reserved for randomized restarts, unused
};

// Approximate joint eigenvalue decomposition S_k ~= T D_k T^{-1} minimizing
// the indirect least-squares cost sum_k ||Off(T^{-1} S_k T)||_F^2.
struct JevdSolution {
  MatrixC transform;            // T, unit-norm columns, leading entry real positive
  MatrixC eigenvalues;          // K x d, row k == diag(D_k)
  double residual = 0.0;        // indirect-LS cost at the returned transform
  int sweeps = 0;
  bool converged = false;       // residual <= tol * sum ||S_k||^2
  bool diverged = false;        // numerical cost increase, best iterate kept
  std::vector<double> cost_trace;  // cost after each sweep (index 0: initial)
};

double indirect_ls_cost(const MatrixC& transform,
                        const std::vector<MatrixC>& slices);

JevdSolution solve_jevd(const std::vector<MatrixC>& slices,
                        const JevdOptions& opts = {});

}  // namespace secsi
