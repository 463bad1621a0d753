#include "psrsel/linalg.hpp"

#include <cmath>
#include <limits>

namespace psrsel {

ThinSvd thin_svd(const Eigen::MatrixXd& a) {
  Eigen::BDCSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU |
                                            Eigen::ComputeThinV);
  ThinSvd out{svd.matrixU(), svd.singularValues(), svd.matrixV()};
  for (Eigen::Index j = 0; j < out.u.cols(); ++j) {
    Eigen::Index which = 0;
    double best = -1.0;
    for (Eigen::Index i = 0; i < out.u.rows(); ++i) {
      const double mag = std::abs(out.u(i, j));
      if (mag > best) {
        best = mag;
        which = i;
      }
    }
    if (out.u(which, j) < 0.0) {
      out.u.col(j) = -out.u.col(j);
      out.v.col(j) = -out.v.col(j);
    }
  }
  return out;
}

Eigen::MatrixXd pseudo_inverse(const Eigen::MatrixXd& a, double tol_scale) {
  const ThinSvd svd = thin_svd(a);
  const double sigma_max = svd.s.size() > 0 ? svd.s(0) : 0.0;
  const double scale =
      tol_scale >= 0.0 ? tol_scale
                       : std::numeric_limits<double>::epsilon() *
                             static_cast<double>(std::max(a.rows(), a.cols()));
  const double tol = scale * sigma_max;
  Eigen::VectorXd inv = Eigen::VectorXd::Zero(svd.s.size());
  for (Eigen::Index i = 0; i < svd.s.size(); ++i)
    if (svd.s(i) > tol) inv(i) = 1.0 / svd.s(i);
  return svd.v * inv.asDiagonal() * svd.u.transpose();
}

}  // namespace psrsel
