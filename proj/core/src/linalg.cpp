#include "tnload/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/QR>
#include <Eigen/SVD>

namespace tnload::linalg {

Svd svd(const Matrix& a) {
  if (!all_finite(a)) throw NumericError("svd: matrix has non-finite entries");
  Svd out;
  const Eigen::Index k = std::min(a.rows(), a.cols());
  if (k == 0) {
    out.U = Matrix(a.rows(), 0);
    out.S = RealVector(0);
    out.V = Matrix(a.cols(), 0);
    return out;
  }
  Eigen::BDCSVD<Matrix> dec(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (dec.info() != Eigen::Success) throw NumericError("svd: decomposition did not converge");
  out.U = dec.matrixU();
  out.S = dec.singularValues();
  out.V = dec.matrixV();

  for (Eigen::Index j = 0; j < k; ++j) {
    Eigen::Index pivot = 0;
    double best = -1.0;
    for (Eigen::Index i = 0; i < out.U.rows(); ++i) {
      const double mag = std::abs(out.U(i, j));
      if (mag > best) {
        best = mag;
        pivot = i;
      }
    }
    if (best <= 0.0) continue;
    const cplx phase = std::conj(out.U(pivot, j)) / best;
    out.U.col(j) *= phase;
    out.V.col(j) *= phase;
    out.U(pivot, j) = cplx(std::abs(out.U(pivot, j)), 0.0);
  }
  return out;
}

Qr qr(const Matrix& a) {
  if (!all_finite(a)) throw NumericError("qr: matrix has non-finite entries");
  const Eigen::Index m = a.rows();
  const Eigen::Index n = a.cols();
  const Eigen::Index k = std::min(m, n);
  Eigen::HouseholderQR<Matrix> dec(a);
  Qr out;
  out.Q = dec.householderQ() * Matrix::Identity(m, k);
  out.R = dec.matrixQR().topRows(k).triangularView<Eigen::Upper>();
  for (Eigen::Index j = 0; j < k; ++j) {
    const double mag = std::abs(out.R(j, j));
    if (mag == 0.0) continue;
    const cplx phase = out.R(j, j) / mag;
    out.Q.col(j) *= phase;
    out.R.row(j) *= std::conj(phase);
  }
  return out;
}

double isometry_defect(const Matrix& a) {
  if (a.cols() == 0) return 0.0;
  const Matrix g = a.adjoint() * a;
  return (g - Matrix::Identity(g.rows(), g.cols())).cwiseAbs().maxCoeff();
}

double unitarity_defect(const Matrix& u) {
  if (u.rows() != u.cols()) return std::numeric_limits<double>::infinity();
  return isometry_defect(u);
}

bool all_finite(const Matrix& a) {
  for (Eigen::Index j = 0; j < a.cols(); ++j)
    for (Eigen::Index i = 0; i < a.rows(); ++i)
      if (!std::isfinite(a(i, j).real()) || !std::isfinite(a(i, j).imag())) return false;
  return true;
}

}  // namespace tnload::linalg
