#pragma once

#include <Eigen/Dense>
#include <vector>

namespace rif {

using Scalar = double;
using Index = Eigen::Index;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using IndexVector = Eigen::VectorXi;

// A subset of cells, kept sorted and duplicate-free.
using CellSet = std::vector<Index>;

}  // namespace rif
