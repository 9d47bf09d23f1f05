#pragma once

#include <complex>

#include <Eigen/Dense>

namespace irsbf {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using CRowVector = Eigen::RowVectorXcd;
using RVector = Eigen::VectorXd;

}  // namespace irsbf
