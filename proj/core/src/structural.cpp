#include <secsi/structural.hpp>

#include <stdexcept>

namespace secsi {

MatrixC kron(const MatrixC& a, const MatrixC& b) {
  MatrixC out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index j = 0; j < a.cols(); ++j)
    for (Index i = 0; i < a.rows(); ++i)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

MatrixC khatri_rao(const MatrixC& a, const MatrixC& b) {
  if (a.cols() != b.cols()) {
    throw std::invalid_argument("khatri_rao requires equal column counts");
  }
  MatrixC out(a.rows() * b.rows(), a.cols());
  for (Index l = 0; l < a.cols(); ++l)
    for (Index i = 0; i < a.rows(); ++i)
      out.col(l).segment(i * b.rows(), b.rows()) = a(i, l) * b.col(l);
  return out;
}

namespace {

// Flat position of entry (i,j,k) inside vec{[Z]_(r)}, 0-based.
Index vec_pos(const Dims3& m, int mode, Index i, Index j, Index k) {
  switch (mode) {
    case 1:
      return (j * m[2] + k) * m[0] + i;
    case 2:
      return (k * m[0] + i) * m[1] + j;
    default:
      return (i * m[1] + j) * m[2] + k;
  }
}

}  // namespace

Permutation perm_r_to_1(const Dims3& dims, int mode) {
  if (mode < 1 || mode > 3) {
    throw std::invalid_argument("mode must be 1, 2 or 3");
  }
  const Index n = dims[0] * dims[1] * dims[2];
  Permutation p(n);
  // Eigen semantics: (P*v)(indices[i]) = v(i), so indices[src] = dst.
  for (Index k = 0; k < dims[2]; ++k)
    for (Index j = 0; j < dims[1]; ++j)
      for (Index i = 0; i < dims[0]; ++i)
        p.indices()[vec_pos(dims, 1, i, j, k)] = vec_pos(dims, mode, i, j, k);
  return p;
}

Permutation perm_transpose(Index rows, Index cols) {
  Permutation p(rows * cols);
  for (Index c = 0; c < cols; ++c)
    for (Index r = 0; r < rows; ++r) p.indices()[c * rows + r] = r * cols + c;
  return p;
}

Permutation perm_reorder_vec1(const Dims3& dims, const ModeOrder& order) {
  const Dims3 out{dims[order[0] - 1], dims[order[1] - 1], dims[order[2] - 1]};
  const Index n = dims[0] * dims[1] * dims[2];
  Permutation p(n);
  Index idx[3];
  auto& [i, j, k] = idx;
  for (k = 0; k < dims[2]; ++k)
    for (j = 0; j < dims[1]; ++j)
      for (i = 0; i < dims[0]; ++i)
        p.indices()[vec_pos(dims, 1, i, j, k)] =
            vec_pos(out, 1, idx[order[0] - 1], idx[order[1] - 1],
                    idx[order[2] - 1]);
  return p;
}

MatrixC vec_off_selector(Index d) {
  MatrixC j = MatrixC::Identity(d * d, d * d);
  for (Index a = 0; a < d; ++a) j(a * d + a, a * d + a) = 0.0;
  return j;
}

MatrixC vec_ddiag_selector(Index d) {
  MatrixC w = MatrixC::Zero(d * d, d * d);
  for (Index a = 0; a < d; ++a) w(a * d + a, a * d + a) = 1.0;
  return w;
}

MatrixC diag_extract_selector(Index d) {
  MatrixC w = MatrixC::Zero(d, d * d);
  for (Index a = 0; a < d; ++a) w(a, a * d + a) = 1.0;
  return w;
}

MatrixC krp_vec_fixed_left(const MatrixC& x, Index rows_y) {
  const Index mx = x.rows(), d = x.cols(), my = rows_y;
  MatrixC g = MatrixC::Zero(d * mx * my, d * my);
  for (Index l = 0; l < d; ++l)
    for (Index a = 0; a < mx; ++a)
      g.block(l * mx * my + a * my, l * my, my, my) =
          x(a, l) * MatrixC::Identity(my, my);
  return g;
}

MatrixC krp_vec_fixed_right(const MatrixC& y, Index rows_x) {
  const Index my = y.rows(), d = y.cols(), mx = rows_x;
  MatrixC h = MatrixC::Zero(d * mx * my, d * mx);
  for (Index l = 0; l < d; ++l)
    for (Index a = 0; a < mx; ++a)
      h.block(l * mx * my + a * my, l * mx + a, my, 1) = y.col(l);
  return h;
}

}  // namespace secsi
