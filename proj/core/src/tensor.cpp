#include <secsi/tensor.hpp>

#include <stdexcept>

#include <secsi/structural.hpp>

namespace secsi {

namespace {

void check_mode(int mode) {
  if (mode < 1 || mode > 3) {
    throw std::invalid_argument("tensor mode must be 1, 2 or 3");
  }
}

}  // namespace

Tensor3::Tensor3(Index m1, Index m2, Index m3) : dims_{m1, m2, m3} {
  if (m1 < 1 || m2 < 1 || m3 < 1) {
    throw std::invalid_argument("tensor dimensions must be positive");
  }
  data_ = VectorC::Zero(m1 * m2 * m3);
}

Tensor3 Tensor3::from_vec1(const Dims3& dims, VectorC data) {
  Tensor3 t(dims);
  if (data.size() != t.size()) {
    throw std::invalid_argument("entry count does not match dimensions");
  }
  t.data_ = std::move(data);
  return t;
}

Tensor3& Tensor3::operator+=(const Tensor3& other) {
  if (dims_ != other.dims_) throw std::invalid_argument("dimension mismatch");
  data_ += other.data_;
  return *this;
}

Tensor3& Tensor3::operator-=(const Tensor3& other) {
  if (dims_ != other.dims_) throw std::invalid_argument("dimension mismatch");
  data_ -= other.data_;
  return *this;
}

Tensor3& Tensor3::operator*=(Complex scale) {
  data_ *= scale;
  return *this;
}

MatrixC unfold(const Tensor3& t, int mode) {
  check_mode(mode);
  const auto [m1, m2, m3] = t.dims();
  switch (mode) {
    case 1:
      // Storage is exactly the column-major 1-mode unfolding.
      return Eigen::Map<const MatrixC>(t.vec1().data(), m1, m2 * m3);
    case 2: {
      MatrixC out(m2, m3 * m1);
      for (Index k = 0; k < m3; ++k)
        for (Index j = 0; j < m2; ++j)
          for (Index i = 0; i < m1; ++i) out(j, k * m1 + i) = t(i, j, k);
      return out;
    }
    default: {
      MatrixC out(m3, m1 * m2);
      for (Index k = 0; k < m3; ++k)
        for (Index j = 0; j < m2; ++j)
          for (Index i = 0; i < m1; ++i) out(k, i * m2 + j) = t(i, j, k);
      return out;
    }
  }
}

Tensor3 fold(const MatrixC& m, int mode, const Dims3& dims) {
  check_mode(mode);
  const auto [m1, m2, m3] = dims;
  const Index rows = dims[mode - 1];
  const Index cols = m1 * m2 * m3 / rows;
  if (m.rows() != rows || m.cols() != cols) {
    throw std::invalid_argument("matrix shape does not match fold dimensions");
  }
  Tensor3 t(dims);
  switch (mode) {
    case 1:
      t.vec1() = Eigen::Map<const VectorC>(m.data(), m.size());
      break;
    case 2:
      for (Index k = 0; k < m3; ++k)
        for (Index j = 0; j < m2; ++j)
          for (Index i = 0; i < m1; ++i) t(i, j, k) = m(j, k * m1 + i);
      break;
    default:
      for (Index k = 0; k < m3; ++k)
        for (Index j = 0; j < m2; ++j)
          for (Index i = 0; i < m1; ++i) t(i, j, k) = m(k, i * m2 + j);
      break;
  }
  return t;
}

Tensor3 mode_product(const Tensor3& t, const MatrixC& b, int mode) {
  check_mode(mode);
  if (b.cols() != t.dim(mode)) {
    throw std::invalid_argument("mode product dimension mismatch");
  }
  Dims3 dims = t.dims();
  dims[mode - 1] = b.rows();
  return fold(b * unfold(t, mode), mode, dims);
}

Tensor3 multi_mode_product(const Tensor3& t, const MatrixC& b1,
                           const MatrixC& b2, const MatrixC& b3) {
  return mode_product(mode_product(mode_product(t, b1, 1), b2, 2), b3, 3);
}

Tensor3 cp_construct(const MatrixC& f1, const MatrixC& f2, const MatrixC& f3) {
  const Index d = f1.cols();
  if (f2.cols() != d || f3.cols() != d) {
    throw std::invalid_argument("factor matrices must share the column count");
  }
  return fold(f1 * khatri_rao(f2, f3).transpose(), 1,
              {f1.rows(), f2.rows(), f3.rows()});
}

Tensor3 permute_modes(const Tensor3& t, const ModeOrder& order) {
  const Dims3 in = t.dims();
  Dims3 out_dims{in[order[0] - 1], in[order[1] - 1], in[order[2] - 1]};
  Tensor3 out(out_dims);
  Index idx[3];
  auto& [i, j, k] = idx;
  for (k = 0; k < in[2]; ++k)
    for (j = 0; j < in[1]; ++j)
      for (i = 0; i < in[0]; ++i)
        out(idx[order[0] - 1], idx[order[1] - 1], idx[order[2] - 1]) =
            t(i, j, k);
  return out;
}

double higher_order_norm(const Tensor3& t) { return t.norm(); }

}  // namespace secsi
