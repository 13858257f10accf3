#pragma once

#include <array>
#include <string>
#include <vector>

#include "tnload/image_codec.hpp"
#include "tnload/types.hpp"

namespace tnload {

/// One MPS site with shape left x 2 x right, stored as the two physical
/// slices A^0, A^1 (each left x right).
struct SiteTensor {
  std::array<Matrix, 2> slice;

  SiteTensor() = default;
  SiteTensor(Eigen::Index left, Eigen::Index right);

  Eigen::Index left_dim() const { return slice[0].rows(); }
  Eigen::Index right_dim() const { return slice[0].cols(); }

  cplx& operator()(Eigen::Index a, int s, Eigen::Index b) { return slice[s](a, b); }
  cplx operator()(Eigen::Index a, int s, Eigen::Index b) const { return slice[s](a, b); }

  /// (2 * left) x right matrix with row index 2 * a + s.
  Matrix left_matrix() const;
  /// left x (2 * right) matrix with column index s * right + b.
  Matrix right_matrix() const;

  static SiteTensor from_left_matrix(const Matrix& m, Eigen::Index left);
  static SiteTensor from_right_matrix(const Matrix& m, Eigen::Index right);
};

enum class CanonicalForm { None, Left, Right };

std::string_view to_string(CanonicalForm form);

/// Open-boundary matrix product state over qubits. Site 0 is the most
/// significant bit of the dense basis index.
class Mps {
 public:
  Mps() = default;
  Mps(std::vector<SiteTensor> tensors, CanonicalForm form, int max_bond);

  int n_sites() const { return static_cast<int>(tensors_.size()); }
  const SiteTensor& site(int i) const { return tensors_[static_cast<std::size_t>(i)]; }
  const std::vector<SiteTensor>& tensors() const { return tensors_; }
  CanonicalForm canonical_form() const { return form_; }
  /// Bond cap the state was built under (informational).
  int max_bond() const { return max_bond_; }

  /// N + 1 entries; the first and last are always 1.
  std::vector<int> bond_dims() const;
  int largest_bond() const;

  /// Product state |s_0 s_1 ... s_{N-1}>.
  static Mps basis_state(const std::vector<int>& bits);

 private:
  std::vector<SiteTensor> tensors_;
  CanonicalForm form_ = CanonicalForm::None;
  int max_bond_ = 0;
};

/// Discarded weight per bond; bond i sits between sites i-1 and i
/// (entries for bonds 1..N-1, index 0 unused and always zero).
struct TruncationReport {
  std::vector<double> discarded;

  double total() const;
};

struct MpsWithReport {
  Mps mps;
  TruncationReport report;
};

/// Singular values at or below this fraction of the largest are dropped
/// even when the discard budget is zero; their weight is still reported.
inline constexpr double kRelativeSingularCutoff = 1e-14;

namespace mps {

/// Left-to-right sequential SVD compression of a unit vector.
///
/// At each bond at most chi_max singular values are kept; beyond that the
/// smallest values are dropped while the accumulated discarded weight at that
/// bond stays within eps_max. The result is left-canonical and renormalized.
MpsWithReport from_dense(const Vector& v, int chi_max, double eps_max = 0.0);
MpsWithReport from_dense(const AmplitudeState& s, int chi_max, double eps_max = 0.0);

Vector to_dense(const Mps& m, int dense_cap = kDefaultDenseCap);

/// Bond-capped recompression. Output is left-canonical, unit-norm.
MpsWithReport truncate(const Mps& m, int chi);

/// <a|b> by transfer matrices.
cplx inner(const Mps& a, const Mps& b);

double norm(const Mps& m);

/// Both return the normalized state.
Mps left_canonicalize(const Mps& m);
Mps right_canonicalize(const Mps& m);

/// Largest isometry defect over all sites for the left-canonical condition
/// sum_{a,s} conj(A[a,s,b]) A[a,s,b'] = delta_{bb'}.
double left_canonical_defect(const Mps& m);

/// Apply a 4x4 gate to sites (site, site + 1). The gate's basis index is
/// 2 * s_site + s_{site+1}. Bond is recapped at chi_max, the discarded weight
/// is reported at bond site + 1, and the state is renormalized.
MpsWithReport apply_two_qubit_gate(const Mps& m, const Matrix4& gate, int site, int chi_max);

std::string to_json(const Mps& m, BitOrdering ordering);
struct MpsFile {
  Mps mps;
  BitOrdering ordering = BitOrdering::InterleavedStraight;
};
MpsFile from_json(const std::string& text);

}  // namespace mps
}  // namespace tnload
