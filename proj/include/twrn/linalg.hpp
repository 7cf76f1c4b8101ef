#pragma once

#include <Eigen/Dense>
#include <complex>

namespace twrn {

using Complex = std::complex<double>;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;
using RVec = Eigen::VectorXd;

inline double max_abs(const CMat& m) { return m.cwiseAbs().maxCoeff(); }

// max |(U^H U - I)_{ij}|
inline double unitarity_error(const CMat& u) {
    CMat d = u.adjoint() * u - CMat::Identity(u.rows(), u.cols());
    return max_abs(d);
}

}  // namespace twrn
