#include "dcmg/linalg.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <stdexcept>

namespace dcmg {

namespace {

constexpr int kTaylorOrder = 20;

}  // namespace

MatX expm(const MatX& a)
{
    if (a.rows() != a.cols()) {
        throw std::invalid_argument("expm: matrix must be square");
    }
    const Eigen::Index n = a.rows();
    if (n == 0) {
        return a;
    }

    const double norm1 = a.cwiseAbs().colwise().sum().maxCoeff();
    int squarings = 0;
    if (norm1 > 0.5) {
        squarings = static_cast<int>(std::ceil(std::log2(norm1 / 0.5)));
    }
    const MatX scaled = a / std::ldexp(1.0, squarings);

    // Horner evaluation of sum_{l=0}^{order} X^l / l!
    MatX result = MatX::Identity(n, n);
    for (int l = kTaylorOrder; l >= 1; --l) {
        result = MatX::Identity(n, n) + (scaled * result) / static_cast<double>(l);
    }
    for (int s = 0; s < squarings; ++s) {
        result = (result * result).eval();
    }
    return result;
}

Mat2 expm(const Mat2& a)
{
    return Mat2(expm(MatX(a)));
}

ZohResult zoh(const MatX& a, const MatX& b, double t)
{
    if (!(t > 0.0)) {
        throw std::invalid_argument("zoh: sampling time must be positive");
    }
    const Eigen::Index n = a.rows();
    if (a.cols() != n || b.rows() != n) {
        throw std::invalid_argument("zoh: dimension mismatch");
    }

    // exp([[A, I], [0, 0]] T) = [[exp(AT), Y], [0, I]]
    MatX aug = MatX::Zero(2 * n, 2 * n);
    aug.topLeftCorner(n, n) = a * t;
    aug.topRightCorner(n, n) = MatX::Identity(n, n) * t;
    const MatX e = expm(aug);

    ZohResult out;
    out.state = e.topLeftCorner(n, n);
    const MatX integral = e.topRightCorner(n, n);
    out.input = integral * b;
    return out;
}

double spectral_radius(const Mat2& m)
{
    Eigen::EigenSolver<Mat2> es(m, false);
    return es.eigenvalues().cwiseAbs().maxCoeff();
}

}  // namespace dcmg
