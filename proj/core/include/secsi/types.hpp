#pragma once

#include <array>
#include <complex>

#include <Eigen/Dense>

namespace secsi {

using Complex = std::complex<double>;
using MatrixC = Eigen::MatrixXcd;
using VectorC = Eigen::VectorXcd;
using MatrixR = Eigen::MatrixXd;
using VectorR = Eigen::VectorXd;
using Index = Eigen::Index;

// Per-mode extents of a 3-way tensor.
using Dims3 = std::array<Index, 3>;

// Mode reordering in the Matlab permute() sense, 1-based mode labels.
using ModeOrder = std::array<int, 3>;

}  // namespace secsi
