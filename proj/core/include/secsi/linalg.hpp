#pragma once

#include <vector>

#include <secsi/types.hpp>

namespace secsi {

// Moore-Penrose pseudo-inverse via SVD; singular values below
// rcond * sigma_max are treated as zero.
MatrixC pinv(const MatrixC& m, double rcond = 1e-12);

// 2-norm condition number, sigma_max / sigma_min. Returns +inf when the
// smallest singular value underflows relative to the largest.
double cond2(const MatrixC& m);

// Unitary W minimizing ||A*W - B||_F (orthogonal Procrustes).
MatrixC unitary_align(const MatrixC& a, const MatrixC& b);

// Greedy max assignment on a square score matrix: repeatedly takes the
// largest remaining entry. out[row] = assigned column.
std::vector<Index> greedy_assignment(const MatrixR& score);

}  // namespace secsi
