#include <secsi/linalg.hpp>

#include <limits>

namespace secsi {

MatrixC pinv(const MatrixC& m, double rcond) {
  Eigen::JacobiSVD<MatrixC> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  if (sv.size() == 0) return MatrixC::Zero(m.cols(), m.rows());
  const double cutoff = rcond * sv(0);
  VectorR inv = VectorR::Zero(sv.size());
  for (Index i = 0; i < sv.size(); ++i) {
    if (sv(i) > cutoff) inv(i) = 1.0 / sv(i);
  }
  return svd.matrixV() * inv.asDiagonal() * svd.matrixU().adjoint();
}

double cond2(const MatrixC& m) {
  Eigen::JacobiSVD<MatrixC> svd(m);
  const auto& sv = svd.singularValues();
  const double smax = sv(0);
  const double smin = sv(sv.size() - 1);
  if (smax == 0.0 || smin == 0.0) {
    return std::numeric_limits<double>::infinity();
  }
  return smax / smin;
}

MatrixC unitary_align(const MatrixC& a, const MatrixC& b) {
  Eigen::JacobiSVD<MatrixC> svd(a.adjoint() * b,
                                Eigen::ComputeThinU | Eigen::ComputeThinV);
  return svd.matrixU() * svd.matrixV().adjoint();
}

std::vector<Index> greedy_assignment(const MatrixR& score) {
  const Index n = score.rows();
  std::vector<bool> row_used(n, false), col_used(n, false);
  std::vector<Index> out(n, -1);
  for (Index step = 0; step < n; ++step) {
    double best = -std::numeric_limits<double>::infinity();
    Index ba = 0, bc = 0;
    for (Index a = 0; a < n; ++a) {
      if (row_used[a]) continue;
      for (Index c = 0; c < n; ++c) {
        if (col_used[c]) continue;
        if (score(a, c) > best) {
          best = score(a, c);
          ba = a;
          bc = c;
        }
      }
    }
    out[ba] = bc;
    row_used[ba] = col_used[bc] = true;
  }
  return out;
}

}  // namespace secsi
