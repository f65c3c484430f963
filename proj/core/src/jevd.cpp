#include <secsi/jevd.hpp>

#include <cmath>
#include <limits>
#include <stdexcept>

#include <Eigen/Eigenvalues>

#include <secsi/linalg.hpp>

namespace secsi {

namespace {

void check_slices(const std::vector<MatrixC>& slices) {
  if (slices.empty()) throw std::invalid_argument("no slices given");
  const Index d = slices[0].rows();
  for (const auto& s : slices) {
    if (s.rows() != d || s.cols() != d) {
      throw std::invalid_argument("slices must be square and equally sized");
    }
  }
}

double off_cost(const std::vector<MatrixC>& ms) {
  double c = 0.0;
  for (const auto& m : ms) {
    c += m.squaredNorm() - m.diagonal().squaredNorm();
  }
  return c;
}

std::vector<MatrixC> similarity(const MatrixC& t,
                                const std::vector<MatrixC>& slices) {
  Eigen::PartialPivLU<MatrixC> lu(t);
  std::vector<MatrixC> ms;
  ms.reserve(slices.size());
  for (const auto& s : slices) ms.push_back(lu.solve(s) * t);
  return ms;
}

// Local indirect-LS cost along one elementary shear T <- T(I + a*e_i e_j^T),
// restricted to the affected off-diagonal entries:
//   f(a) = K0 + 2Re(conj(a) S1) + |a|^2 S2 - 2Re(conj(a)^2 S3)
//          - 2|a|^2 Re(conj(a) S4) + |a|^4 S5.
struct ShearPoly {
  double k0 = 0.0, s2 = 0.0, s5 = 0.0;
  Complex s1{0, 0}, s3{0, 0}, s4{0, 0};

  double eval(Complex a) const {
    const double x = a.real(), y = a.imag(), rho = x * x + y * y;
    const double re_a_s1 = x * s1.real() + y * s1.imag();
    const double re_a2_s3 =
        (x * x - y * y) * s3.real() + 2.0 * x * y * s3.imag();
    const double re_a_s4 = x * s4.real() + y * s4.imag();
    return k0 + 2.0 * re_a_s1 + rho * s2 - 2.0 * re_a2_s3 -
           2.0 * rho * re_a_s4 + rho * rho * s5;
  }

  void gradient(Complex a, double& gx, double& gy) const {
    const double x = a.real(), y = a.imag(), rho = x * x + y * y;
    const double dot4 = x * s4.real() + y * s4.imag();
    gx = 2.0 * s1.real() + 2.0 * x * s2 -
         4.0 * (x * s3.real() + y * s3.imag()) - 4.0 * x * dot4 -
         2.0 * rho * s4.real() + 4.0 * rho * x * s5;
    gy = 2.0 * s1.imag() + 2.0 * y * s2 + 4.0 * y * s3.real() -
         4.0 * x * s3.imag() - 4.0 * y * dot4 - 2.0 * rho * s4.imag() +
         4.0 * rho * y * s5;
  }

  void hessian(Complex a, double& hxx, double& hxy, double& hyy) const {
    const double x = a.real(), y = a.imag();
    hxx = 2.0 * s2 - 4.0 * s3.real() - 12.0 * x * s4.real() -
          4.0 * y * s4.imag() + (12.0 * x * x + 4.0 * y * y) * s5;
    hxy = -4.0 * s3.imag() - 4.0 * y * s4.real() - 4.0 * x * s4.imag() +
          8.0 * x * y * s5;
    hyy = 2.0 * s2 + 4.0 * s3.real() - 4.0 * x * s4.real() -
          12.0 * y * s4.imag() + (4.0 * x * x + 12.0 * y * y) * s5;
  }
};

ShearPoly build_shear_poly(const std::vector<MatrixC>& ms, Index i, Index j) {
  ShearPoly p;
  const Index d = ms[0].rows();
  for (const auto& m : ms) {
    for (Index a = 0; a < d; ++a) {
      if (a == i || a == j) continue;
      // column j entries: m_aj + alpha * m_ai
      p.k0 += std::norm(m(a, j));
      p.s1 += std::conj(m(a, i)) * m(a, j);
      p.s2 += std::norm(m(a, i));
    }
    for (Index b = 0; b < d; ++b) {
      if (b == i || b == j) continue;
      // row i entries: m_ib - alpha * m_jb
      p.k0 += std::norm(m(i, b));
      p.s1 -= std::conj(m(j, b)) * m(i, b);
      p.s2 += std::norm(m(j, b));
    }
    // (i, j): m_ij + alpha (m_ii - m_jj) - alpha^2 m_ji
    const Complex w = m(i, j);
    const Complex c = m(i, i) - m(j, j);
    const Complex r = m(j, i);
    p.k0 += std::norm(w);
    p.s1 += std::conj(c) * w;
    p.s2 += std::norm(c);
    p.s3 += std::conj(r) * w;
    p.s4 += std::conj(r) * c;
    p.s5 += std::norm(r);
  }
  return p;
}

// Minimize the local quartic: linearized seed, then damped Newton.
Complex minimize_shear(const ShearPoly& p) {
  if (p.s2 <= 0.0) return {0.0, 0.0};
  Complex a = -p.s1 / p.s2;
  double f = p.eval(a);
  if (!(f < p.k0)) {
    a = {0.0, 0.0};
    f = p.k0;
  }
  for (int iter = 0; iter < 8; ++iter) {
    double gx, gy;
    p.gradient(a, gx, gy);
    const double gnorm = std::hypot(gx, gy);
    if (gnorm <= 1e-18 * (1.0 + std::abs(f))) break;
    double hxx, hxy, hyy;
    p.hessian(a, hxx, hxy, hyy);
    const double det = hxx * hyy - hxy * hxy;
    double dx, dy;
    if (det > 0.0 && hxx > 0.0) {
      dx = -(hyy * gx - hxy * gy) / det;
      dy = -(hxx * gy - hxy * gx) / det;
    } else {
      const double scale = std::max({std::abs(hxx), std::abs(hyy), 1.0});
      dx = -gx / scale;
      dy = -gy / scale;
    }
    bool accepted = false;
    double step = 1.0;
    for (int half = 0; half < 12; ++half) {
      const Complex cand = a + Complex(step * dx, step * dy);
      const double fc = p.eval(cand);
      if (fc < f) {
        a = cand;
        f = fc;
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;
  }
  return (f < p.k0) ? a : Complex{0.0, 0.0};
}

void apply_shear(std::vector<MatrixC>& ms, MatrixC& t, Complex a, Index i,
                 Index j) {
  for (auto& m : ms) {
    m.col(j) += a * m.col(i);
    m.row(i) -= a * m.row(j);
  }
  t.col(j) += a * t.col(i);
}

void normalize_columns(MatrixC& t) {
  for (Index l = 0; l < t.cols(); ++l) {
    const double n = t.col(l).norm();
    if (n > 0.0) t.col(l) /= n;
    Index imax;
    t.col(l).cwiseAbs().maxCoeff(&imax);
    const Complex pivot = t(imax, l);
    if (std::abs(pivot) > 0.0) t.col(l) *= std::conj(pivot) / std::abs(pivot);
  }
}

// Slices proportional to the identity carry no eigenvector information.
bool near_scalar(const MatrixC& s) {
  const Index d = s.rows();
  const Complex mean = s.trace() / static_cast<double>(d);
  const double dev =
      (s - mean * MatrixC::Identity(d, d)).norm();
  return dev <= 1e-9 * (s.norm() + 1e-300);
}

MatrixC initial_transform(const std::vector<MatrixC>& slices) {
  const Index d = slices[0].rows();
  int best = -1;
  double best_cond = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < slices.size(); ++k) {
    if (near_scalar(slices[k])) continue;
    const double c = cond2(slices[k]);
    if (c < best_cond) {
      best_cond = c;
      best = static_cast<int>(k);
    }
  }
  if (best < 0) return MatrixC::Identity(d, d);
  Eigen::ComplexEigenSolver<MatrixC> eig(slices[best]);
  if (eig.info() != Eigen::Success) return MatrixC::Identity(d, d);
  MatrixC t = eig.eigenvectors();
  if (!t.allFinite() || cond2(t) > 1e10) return MatrixC::Identity(d, d);
  return t;
}

}  // namespace

double indirect_ls_cost(const MatrixC& transform,
                        const std::vector<MatrixC>& slices) {
  check_slices(slices);
  if (transform.rows() != slices[0].rows() ||
      transform.cols() != slices[0].cols()) {
    throw std::invalid_argument("transform size does not match slices");
  }
  Eigen::FullPivLU<MatrixC> lu(transform);
  if (!lu.isInvertible()) {
    throw std::invalid_argument("transform is singular");
  }
  double c = 0.0;
  for (const auto& s : slices) {
    const MatrixC m = lu.solve(s) * transform;
    c += m.squaredNorm() - m.diagonal().squaredNorm();
  }
  return c;
}

JevdSolution solve_jevd(const std::vector<MatrixC>& slices,
                        const JevdOptions& opts) {
  check_slices(slices);
  const Index d = slices[0].rows();
  const Index k_count = static_cast<Index>(slices.size());

  JevdSolution sol;

  double scale = 0.0;
  for (const auto& s : slices) scale += s.squaredNorm();

  if (d == 1 || scale == 0.0) {
    sol.transform = MatrixC::Identity(d, d);
    sol.eigenvalues.resize(k_count, d);
    for (Index k = 0; k < k_count; ++k)
      sol.eigenvalues.row(k) = slices[k].diagonal().transpose();
    sol.residual = 0.0;
    sol.converged = true;
    sol.cost_trace = {0.0};
    return sol;
  }

  MatrixC t = initial_transform(slices);
  normalize_columns(t);
  std::vector<MatrixC> ms = similarity(t, slices);
  double cost = off_cost(ms);
  sol.cost_trace.push_back(cost);

  MatrixC best_t = t;
  double best_cost = cost;

  const double target = opts.tol * scale;
  int stagnant = 0;

  for (int sweep = 1; sweep <= opts.max_sweeps && cost > target; ++sweep) {
    bool any = false;
    for (Index i = 0; i < d; ++i) {
      for (Index j = 0; j < d; ++j) {
        if (i == j) continue;
        const ShearPoly poly = build_shear_poly(ms, i, j);
        const Complex a = minimize_shear(poly);
        if (a != Complex{0.0, 0.0}) {
          apply_shear(ms, t, a, i, j);
          any = true;
        }
      }
    }
    sol.sweeps = sweep;

    // Refresh from scratch once per sweep to keep incremental drift out.
    ms = similarity(t, slices);
    const double fresh = off_cost(ms);
    if (fresh > cost * (1.0 + 1e-6) && fresh > target) {
      sol.diverged = true;
      sol.cost_trace.push_back(fresh);
      break;
    }
    cost = fresh;
    sol.cost_trace.push_back(cost);
    if (cost < best_cost) {
      best_cost = cost;
      best_t = t;
    }

    if (!any) break;
    const double prev = sol.cost_trace[sol.cost_trace.size() - 2];
    if (prev - cost <= 1e-12 * std::max(cost, 1e-300 * scale)) {
      if (++stagnant >= 2) break;
    } else {
      stagnant = 0;
    }
  }

  t = best_t;
  normalize_columns(t);

  Eigen::PartialPivLU<MatrixC> lu(t);
  sol.eigenvalues.resize(k_count, d);
  double final_cost = 0.0;
  for (Index k = 0; k < k_count; ++k) {
    const MatrixC m = lu.solve(slices[k]) * t;
    sol.eigenvalues.row(k) = m.diagonal().transpose();
    final_cost += m.squaredNorm() - m.diagonal().squaredNorm();
  }
  sol.transform = t;
  sol.residual = final_cost;
  sol.converged = final_cost <= target;
  return sol;
}

}  // namespace secsi
