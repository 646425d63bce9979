#pragma once

#include <Eigen/Dense>

namespace dcmg {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;
using VecX = Eigen::VectorXd;
using MatX = Eigen::MatrixXd;

/// Matrix exponential by scaling and squaring around a fixed-order Taylor
/// polynomial. The argument is scaled so its 1-norm is at most 1/2, which
/// keeps the order-20 truncation below double-precision round-off.
MatX expm(const MatX& a);

Mat2 expm(const Mat2& a);

/// Zero-order-hold discretization of x' = A x + B v.
///
/// Returns (exp(A T), Y B) with Y = integral_0^T exp(A s) ds, read off the
/// top-right block of exp([[A, I], [0, 0]] T). No inverse of A is formed,
/// so singular generators (isolated node without load, A = 0) are fine.
struct ZohResult {
    MatX state;
    MatX input;
};
ZohResult zoh(const MatX& a, const MatX& b, double t);

/// Elementwise absolute value, used by the componentwise noise bounds.
inline Mat2 abs(const Mat2& m) { return m.cwiseAbs(); }
inline Vec2 abs(const Vec2& v) { return v.cwiseAbs(); }

/// Induced infinity norm (max absolute row sum).
inline double norm_inf(const Mat2& m) { return m.cwiseAbs().rowwise().sum().maxCoeff(); }

double spectral_radius(const Mat2& m);

}  // namespace dcmg
