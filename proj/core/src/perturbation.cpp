#include <secsi/perturbation.hpp>

#include <cmath>
#include <stdexcept>

#include <secsi/linalg.hpp>

namespace secsi {

NoiseModel NoiseModel::white_noise(double sigma2) {
  NoiseModel n;
  n.white = true;
  n.sigma2 = sigma2;
  return n;
}

NoiseModel NoiseModel::colored(MatrixC r, std::optional<MatrixC> c) {
  NoiseModel n;
  n.white = false;
  n.covariance = std::move(r);
  n.pseudo_covariance = std::move(c);
  return n;
}

void NoiseModel::validate(Index total_entries) const {
  if (white) {
    if (sigma2 < 0.0) throw std::invalid_argument("negative noise variance");
    return;
  }
  if (covariance.rows() != total_entries ||
      covariance.cols() != total_entries) {
    throw std::invalid_argument("covariance size does not match tensor");
  }
  const double scale = covariance.norm();
  if ((covariance - covariance.adjoint()).norm() > 1e-12 * (scale + 1e-300)) {
    throw std::invalid_argument("covariance is not Hermitian");
  }
  Eigen::SelfAdjointEigenSolver<MatrixC> eig(covariance,
                                             Eigen::EigenvaluesOnly);
  const double tr = covariance.trace().real();
  if (eig.eigenvalues().minCoeff() <
      -1e-10 * std::abs(tr) / static_cast<double>(total_entries)) {
    throw std::invalid_argument("covariance is not positive semidefinite");
  }
}

NoiseModel NoiseModel::permuted(const Permutation& p) const {
  if (white) return *this;
  NoiseModel out = *this;
  out.covariance = p * covariance * p.inverse();
  if (pseudo_covariance) {
    out.pseudo_covariance = p * (*pseudo_covariance) * p.inverse();
  }
  return out;
}

NoiseModel NoiseModel::scaled_to_unit() const {
  NoiseModel out = *this;
  if (white) {
    out.sigma2 = 1.0;
    return out;
  }
  const double mean_diag =
      covariance.trace().real() / static_cast<double>(covariance.rows());
  if (mean_diag <= 0.0) throw std::invalid_argument("degenerate covariance");
  out.covariance = covariance / mean_diag;
  if (pseudo_covariance) {
    out.pseudo_covariance = *pseudo_covariance / mean_diag;
  }
  return out;
}

AnalysisInputs analysis_from_factors(const Tensor3& x0, Index rank,
                                     BranchId branch,
                                     const std::array<MatrixC, 3>& factors) {
  const Tensor3 check = cp_construct(factors[0], factors[1], factors[2]);
  if ((check - x0).norm() > 1e-8 * (x0.norm() + 1e-300)) {
    throw std::invalid_argument("factors do not reconstruct the tensor");
  }

  const ModeOrder order = branch_order(branch.mode);
  AnalysisInputs in;
  in.branch = branch;
  in.rank = rank;
  const Tensor3 xs = permute_modes(x0, order);
  in.slot_dims = xs.dims();
  in.hosvd = truncated_hosvd(xs, rank);
  in.slices = slices_of(expanded_core(in.hosvd, 3));
  in.pivot = select_pivot(in.slices);
  for (int t = 0; t < 3; ++t) in.f_slot[t] = factors[order[t] - 1];

  in.jevd_set = (branch.side == Side::Rhs)
                    ? build_rhs_set(in.slices, in.pivot)
                    : build_lhs_set(in.slices, in.pivot);
  in.transform = (branch.side == Side::Rhs)
                     ? MatrixC(in.hosvd.modes[0].u_signal.adjoint() * in.f_slot[0])
                     : MatrixC(in.hosvd.modes[1].u_signal.adjoint() * in.f_slot[1]);

  const MatrixC& f3 = in.f_slot[2];
  const Index k_count = f3.rows();
  in.d_eig.resize(k_count, rank);
  for (Index l = 0; l < rank; ++l) {
    const Complex denom = f3(in.pivot, l);
    if (std::abs(denom) == 0.0) {
      throw std::runtime_error("pivot row of the third factor has a zero");
    }
    in.d_eig.col(l) = f3.col(l) / denom;
  }
  return in;
}

AnalysisInputs analysis_from_run(const BranchRun& run) {
  AnalysisInputs in;
  in.branch = run.branch;
  in.rank = run.hosvd.rank;
  in.slot_dims = run.slot_dims;
  in.hosvd = run.hosvd;
  in.slices = run.slices;
  in.pivot = run.pivot;
  in.jevd_set = run.jevd_set;
  in.transform = run.jevd.transform;
  in.d_eig = run.jevd.eigenvalues;
  in.f_slot = run.f_slot;
  return in;
}

namespace {

MatrixC identityC(Index n) { return MatrixC::Identity(n, n); }

void zero_diag_rows(MatrixC& m, Index d) {
  for (Index a = 0; a < d; ++a) m.row(a * d + a).setZero();
}

// Pseudo-inverse with the relative cutoff the analysis prescribes, plus the
// effective conditioning of the retained part.
MatrixC pinv_with_cond(const MatrixC& m, double* condition) {
  Eigen::JacobiSVD<MatrixC> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  const double cutoff = 1e-12 * sv(0);
  VectorR inv = VectorR::Zero(sv.size());
  double smallest_kept = sv(0);
  for (Index i = 0; i < sv.size(); ++i) {
    if (sv(i) > cutoff) {
      inv(i) = 1.0 / sv(i);
      smallest_kept = sv(i);
    }
  }
  if (condition) *condition = sv(0) / smallest_kept;
  return svd.matrixV() * inv.asDiagonal() * svd.matrixU().adjoint();
}

// (I_d (x) F)(K^{-1} (x) I_d) W (I_d (x) F^H) * ldf  -  ldf
MatrixC scaling_residual_op(const MatrixC& f, const MatrixC& ldf) {
  const Index mr = f.rows(), d = f.cols(), n = ldf.cols();
  MatrixC out = MatrixC::Zero(mr * d, n);
  for (Index a = 0; a < d; ++a) {
    const double k = f.col(a).squaredNorm();
    // row a*d+a of (I (x) F^H) ldf is f_a^H * (block a of ldf)
    const MatrixC row = f.col(a).adjoint() * ldf.middleRows(a * mr, mr);
    out.middleRows(a * mr, mr) = (1.0 / k) * (f.col(a) * row);
  }
  return out - ldf;
}

}  // namespace

LChain build_l_chain(const AnalysisInputs& in) {
  const auto [m1, m2, m3] = in.slot_dims;
  const Index d = in.rank;
  const Index n = m1 * m2 * m3;
  const Index d2 = d * d;
  const int p = in.pivot;

  const auto& mode1 = in.hosvd.modes[0];
  const auto& mode2 = in.hosvd.modes[1];
  const auto& mode3 = in.hosvd.modes[2];
  const MatrixC& u1 = mode1.u_signal;
  const MatrixC& u2 = mode2.u_signal;
  const MatrixC& u3 = mode3.u_signal;

  // Sigma_r^{-1} V_r^T (plain transpose, from vec{A X B} = (B^T (x) A) vec{X})
  const MatrixC sv1 = mode1.sigma_signal.cwiseInverse().asDiagonal() *
                      mode1.v_signal.transpose();
  const MatrixC sv2 = mode2.sigma_signal.cwiseInverse().asDiagonal() *
                      mode2.v_signal.transpose();
  const MatrixC sv3 = mode3.sigma_signal.cwiseInverse().asDiagonal() *
                      mode3.v_signal.transpose();

  const Permutation p2 = perm_r_to_1(in.slot_dims, 2);
  const Permutation p3 = perm_r_to_1(in.slot_dims, 3);

  LChain c;
  c.du[0] = kron(sv1, mode1.noise_projector);
  c.du[1] = kron(sv2, mode2.noise_projector) * p2;
  c.du[2] = kron(sv3, mode3.noise_projector) * p3;

  c.l0 = kron(u2.adjoint(), kron(u3.adjoint(), u1.adjoint()));

  {
    const Permutation p3_ddd = perm_r_to_1({d, d, d}, 3);
    const Permutation p3_ddm = perm_r_to_1({d, d, m3}, 3);
    const MatrixC term1 = kron(identityC(d2), u3) * (p3_ddd * c.l0);
    const MatrixC s3t = unfold(in.hosvd.core, 3).transpose();
    const MatrixC term2 = kron(MatrixC(s3t * sv3), mode3.noise_projector) * p3;
    c.l1 = p3_ddm.inverse() * MatrixC(term1 + term2);
  }

  c.l2.resize(m3);
  for (Index k = 0; k < m3; ++k) {
    c.l2[k].resize(d2, n);
    for (Index j = 0; j < d; ++j)
      for (Index i = 0; i < d; ++i)
        c.l2[k].row(j * d + i) = c.l1.row((j * m3 + k) * d + i);
  }

  const MatrixC spinv = Eigen::PartialPivLU<MatrixC>(in.slices[p]).inverse();
  c.l3.resize(m3);
  if (in.branch.side == Side::Rhs) {
    const MatrixC spinv_t = spinv.transpose();
    const MatrixC left = kron(spinv_t, identityC(d));
    for (Index k = 0; k < m3; ++k) {
      c.l3[k] = left * c.l2[k] -
                kron(spinv_t, MatrixC(in.slices[k] * spinv)) * c.l2[p];
    }
  } else {
    const Permutation qdd = perm_transpose(d, d);
    const MatrixC left = kron(identityC(d), spinv);
    for (Index k = 0; k < m3; ++k) {
      const MatrixC inner =
          left * c.l2[k] -
          kron(MatrixC(in.slices[k].transpose() * spinv.transpose()), spinv) *
              c.l2[p];
      c.l3[k] = qdd * inner;
    }
  }
  c.l3_stacked.resize(m3 * d2, n);
  for (Index k = 0; k < m3; ++k) c.l3_stacked.middleRows(k * d2, d2) = c.l3[k];

  const MatrixC& t = in.transform;
  const MatrixC tinv = Eigen::PartialPivLU<MatrixC>(t).inverse();

  c.b0 = kron(t.transpose(), tinv);
  zero_diag_rows(c.b0, d);

  c.a.resize(m3 * d2, d2);
  for (Index k = 0; k < m3; ++k) {
    MatrixC ak = kron(identityC(d), MatrixC(tinv * in.jevd_set[k])) -
                 kron(MatrixC(in.d_eig.row(k).asDiagonal()), tinv);
    zero_diag_rows(ak, d);
    c.a.middleRows(k * d2, d2) = ak;
  }

  MatrixC bl3(m3 * d2, n);
  for (Index k = 0; k < m3; ++k) {
    bl3.middleRows(k * d2, d2) = c.b0 * c.l3[k];
  }
  c.l4 = -(pinv_with_cond(c.a, &c.a_condition) * bl3);

  const VectorC f3_pivot_row = in.f_slot[2].row(p).transpose();
  const MatrixC kr = kron(
      MatrixC(f3_pivot_row.asDiagonal().toDenseMatrix() * t.transpose()), tinv);
  c.l4k.resize(m3);
  MatrixC l4k_stack(m3 * d, n);
  for (Index k = 0; k < m3; ++k) {
    c.l4k[k].resize(d, n);
    for (Index a = 0; a < d; ++a) {
      c.l4k[k].row(a) = kr.row(a * d + a) * c.l3[k];
    }
    l4k_stack.middleRows(k * d, d) = c.l4k[k];
  }
  c.l5 = perm_transpose(m3, d).inverse() * l4k_stack;

  if (in.branch.side == Side::Rhs) {
    c.l6 = kron(identityC(d), u1) * c.l4 +
           kron(MatrixC(t.transpose() * sv1), mode1.noise_projector);
    const MatrixC krp = khatri_rao(in.f_slot[2], in.f_slot[0]);
    const MatrixC krp_pinv = pinv(krp, 1e-12);
    const MatrixC h = krp_vec_fixed_right(in.f_slot[0], m3);
    const MatrixC g = krp_vec_fixed_left(in.f_slot[2], m1);
    const Permutation q = perm_transpose(m3 * m1, d);
    c.l7 = kron(krp_pinv, identityC(m2)) * p2 -
           kron(krp_pinv, in.f_slot[1]) * (q * MatrixC(h * c.l5 + g * c.l6));
  } else {
    c.l7 = kron(identityC(d), u2) * c.l4 +
           kron(MatrixC(t.transpose() * sv2), mode2.noise_projector) * p2;
    const MatrixC krp = khatri_rao(in.f_slot[1], in.f_slot[2]);
    const MatrixC krp_pinv = pinv(krp, 1e-12);
    const MatrixC g = krp_vec_fixed_left(in.f_slot[1], m3);
    const MatrixC h = krp_vec_fixed_right(in.f_slot[2], m2);
    const Permutation q = perm_transpose(m2 * m3, d);
    c.l6 = kron(krp_pinv, identityC(m1)) -
           kron(krp_pinv, in.f_slot[0]) * (q * MatrixC(g * c.l5 + h * c.l7));
  }

  c.lf[0] = scaling_residual_op(in.f_slot[0], c.l6);
  c.lf[1] = scaling_residual_op(in.f_slot[1], c.l7);
  c.lf[2] = scaling_residual_op(in.f_slot[2], c.l5);
  return c;
}

double rmsfe_closed_form(const MatrixC& lf, const NoiseModel& noise,
                         const MatrixC& factor) {
  const double fnorm2 = factor.squaredNorm();
  if (fnorm2 <= 0.0) throw std::invalid_argument("zero factor matrix");
  if (noise.white) {
    return noise.sigma2 * lf.squaredNorm() / fnorm2;
  }
  // tr(L R L^H) without forming the full triple product
  const double tr =
      (lf * noise.covariance).cwiseProduct(lf.conjugate()).sum().real();
  return tr / fnorm2;
}

BranchRmsfe analyze_inputs(const AnalysisInputs& in, const Dims3& orig_dims,
                           const NoiseModel& noise) {
  const ModeOrder order = branch_order(in.branch.mode);
  const NoiseModel slot_noise =
      noise.white ? noise : noise.permuted(perm_reorder_vec1(orig_dims, order));

  const LChain chain = build_l_chain(in);
  BranchRmsfe out;
  out.branch = in.branch;
  for (int slot = 0; slot < 3; ++slot) {
    out.by_factor[order[slot] - 1] =
        rmsfe_closed_form(chain.lf[slot], slot_noise, in.f_slot[slot]);
  }
  return out;
}

BranchRmsfe analyze_branch(const Tensor3& x0,
                           const std::array<MatrixC, 3>& factors,
                           BranchId branch, const NoiseModel& noise) {
  return analyze_inputs(analysis_from_factors(x0, factors[0].cols(), branch, factors),
                        x0.dims(), noise);
}

BranchRmsfe analyze_branch_plugin(const Tensor3& x, Index rank,
                                  BranchId branch, const NoiseModel& noise,
                                  const JevdOptions& opts) {
  const BranchRun run = run_branch_full(x, rank, branch, opts);
  return analyze_inputs(analysis_from_run(run), x.dims(), noise);
}

std::vector<BranchRmsfe> analyze_all(const Tensor3& x0,
                                     const std::array<MatrixC, 3>& factors,
                                     const NoiseModel& noise) {
  std::vector<BranchRmsfe> out;
  for (const auto& b : BranchId::all()) {
    out.push_back(analyze_branch(x0, factors, b, noise));
  }
  return out;
}

std::vector<BranchRmsfe> analyze_all_plugin(const Tensor3& x, Index rank,
                                            const NoiseModel& noise,
                                            const JevdOptions& opts) {
  std::vector<BranchRmsfe> out;
  std::vector<BranchFailure> failures;
  for (const auto& run : run_all_full(x, rank, opts, &failures)) {
    out.push_back(analyze_inputs(analysis_from_run(run), x.dims(), noise));
  }
  return out;
}

VectorC theorem1_scaling(const MatrixC& z, const MatrixC& zhat) {
  if (z.rows() != zhat.rows() || z.cols() != zhat.cols()) {
    throw std::invalid_argument("shape mismatch");
  }
  VectorC p(z.cols());
  for (Index a = 0; a < z.cols(); ++a) {
    const double k = z.col(a).squaredNorm();
    if (k == 0.0) throw std::invalid_argument("zero column in reference");
    const Complex e = (z.col(a).adjoint() * zhat.col(a)).value() / k;
    if (std::abs(e) < 1e-300) {
      throw std::runtime_error("estimate column orthogonal to reference");
    }
    p(a) = 1.0 / e;
  }
  return p;
}

}  // namespace secsi
