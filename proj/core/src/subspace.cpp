#include <secsi/subspace.hpp>

#include <limits>
#include <stdexcept>

namespace secsi {

ModeSubspace mode_svd_partition(const Tensor3& t, int mode, Index rank) {
  const MatrixC m = unfold(t, mode);
  const Index rows = m.rows(), cols = m.cols();
  if (rank < 1 || rank > rows || rank > cols) {
    throw std::invalid_argument("rank out of range for mode partition");
  }

  Eigen::JacobiSVD<MatrixC> svd(m, Eigen::ComputeFullU | Eigen::ComputeThinV);
  MatrixC u = svd.matrixU();
  MatrixC v = svd.matrixV();
  const VectorR& sigma = svd.singularValues();

  if (sigma(rank - 1) <= 0.0) {
    throw std::runtime_error("signal singular value vanishes; rank too large");
  }

  const Index nsv = sigma.size();
  for (Index l = 0; l < rows; ++l) {
    Index imax;
    u.col(l).cwiseAbs().maxCoeff(&imax);
    const Complex pivot = u(imax, l);
    if (std::abs(pivot) > 0.0) {
      const Complex phase = pivot / std::abs(pivot);
      u.col(l) *= std::conj(phase);
      if (l < nsv) v.col(l) *= std::conj(phase);
    }
  }

  ModeSubspace s;
  s.u_signal = u.leftCols(rank);
  s.u_noise = u.rightCols(rows - rank);
  s.sigma_signal = sigma.head(rank);
  s.v_signal = v.leftCols(rank);
  s.noise_projector = s.u_noise * s.u_noise.adjoint();
  if (rank < nsv && sigma(rank) > 0.0) {
    s.gap_ratio = sigma(rank - 1) / sigma(rank);
  } else {
    s.gap_ratio = std::numeric_limits<double>::infinity();
  }
  s.weak_gap = s.gap_ratio < 10.0;
  return s;
}

TruncatedHosvd truncated_hosvd(const Tensor3& t, Index rank) {
  TruncatedHosvd h;
  h.rank = rank;
  for (int r = 1; r <= 3; ++r) {
    h.modes[r - 1] = mode_svd_partition(t, r, rank);
  }
  h.core = multi_mode_product(t, h.modes[0].u_signal.adjoint(),
                              h.modes[1].u_signal.adjoint(),
                              h.modes[2].u_signal.adjoint());
  return h;
}

Tensor3 expanded_core(const TruncatedHosvd& h, int mode) {
  return mode_product(h.core, h.modes[mode - 1].u_signal, mode);
}

Tensor3 hosvd_reconstruct(const TruncatedHosvd& h) {
  return multi_mode_product(h.core, h.modes[0].u_signal, h.modes[1].u_signal,
                            h.modes[2].u_signal);
}

}  // namespace secsi
