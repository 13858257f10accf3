#pragma once

#include "tnload/types.hpp"

namespace tnload::linalg {

/// Thin SVD A = U diag(S) V^dagger.
///
/// Singular values are sorted descending. Each column of U is rotated by a
/// phase so that its largest-magnitude entry (first one on ties) is real and
/// positive; the matching column of V absorbs the same phase, so the product
/// is unchanged. This makes every decomposition reproducible bit-for-bit for
/// a given input and build.
struct Svd {
  Matrix U;
  RealVector S;
  Matrix V;
};

Svd svd(const Matrix& a);

/// Thin QR with the diagonal of R made real and nonnegative.
struct Qr {
  Matrix Q;
  Matrix R;
};

Qr qr(const Matrix& a);

/// max |(A^dagger A - I)_{ij}|
double isometry_defect(const Matrix& a);

/// max |(U^dagger U - I)_{ij}| for a square matrix
double unitarity_defect(const Matrix& u);

bool all_finite(const Matrix& a);

}  // namespace tnload::linalg
