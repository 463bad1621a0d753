#pragma once

#include <Eigen/Dense>

namespace psrsel {

// Moore–Penrose pseudo-inverse via SVD.  Singular values at or below
// tol = eps * max(rows, cols) * sigma_max are treated as zero; pass a
// non-negative tol_scale to override the eps factor.
Eigen::MatrixXd pseudo_inverse(const Eigen::MatrixXd& a,
                               double tol_scale = -1.0);

// Thin SVD with a deterministic sign convention: each left singular vector
// is flipped so its largest-magnitude entry is positive (ties by lowest
// index), with the matching right vector flipped in step.
struct ThinSvd {
  Eigen::MatrixXd u;   // m×r
  Eigen::VectorXd s;   // r, descending
  Eigen::MatrixXd v;   // n×r
};
ThinSvd thin_svd(const Eigen::MatrixXd& a);

}  // namespace psrsel
