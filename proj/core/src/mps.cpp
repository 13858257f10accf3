#include "tnload/mps.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include <json.hpp>

#include "tnload/linalg.hpp"

namespace tnload {

namespace {

using json = nlohmann::json;

struct Cut {
  Eigen::Index keep = 0;
  double discarded = 0.0;
};

// Chooses how many leading singular values survive a cut.
Cut choose_cut(const RealVector& s, int chi_max, double eps_max) {
  Cut cut;
  const Eigen::Index n = s.size();
  if (n == 0) return cut;
  const double floor = s(0) * kRelativeSingularCutoff;
  Eigen::Index keep = 0;
  while (keep < n && s(keep) > floor) ++keep;
  keep = std::max<Eigen::Index>(1, std::min<Eigen::Index>(keep, chi_max));
  double discarded = 0.0;
  for (Eigen::Index j = keep; j < n; ++j) discarded += s(j) * s(j);
  while (keep > 1 && discarded + s(keep - 1) * s(keep - 1) <= eps_max) {
    discarded += s(keep - 1) * s(keep - 1);
    --keep;
  }
  cut.keep = keep;
  cut.discarded = discarded;
  return cut;
}

int exact_log2(Eigen::Index n) {
  if (n <= 0 || (n & (n - 1)) != 0) return -1;
  return std::countr_zero(static_cast<std::uint64_t>(n));
}

double frob_norm(const SiteTensor& t) {
  return std::sqrt(t.slice[0].squaredNorm() + t.slice[1].squaredNorm());
}

void scale(SiteTensor& t, cplx factor) {
  t.slice[0] *= factor;
  t.slice[1] *= factor;
}

// Left-orthonormalizes tensors[k] by QR and pushes R into tensors[k + 1].
void qr_step_right(std::vector<SiteTensor>& t, std::size_t k) {
  const Eigen::Index left = t[k].left_dim();
  auto f = linalg::qr(t[k].left_matrix());
  t[k] = SiteTensor::from_left_matrix(f.Q, left);
  for (auto& s : t[k + 1].slice) s = f.R * s;
}

// Right-orthonormalizes tensors[k] by LQ and pushes L into tensors[k - 1].
void lq_step_left(std::vector<SiteTensor>& t, std::size_t k) {
  const Eigen::Index right = t[k].right_dim();
  auto f = linalg::qr(t[k].right_matrix().adjoint());
  t[k] = SiteTensor::from_right_matrix(f.Q.adjoint(), right);
  const Matrix l = f.R.adjoint();
  for (auto& s : t[k - 1].slice) s = s * l;
}

json tensor_to_json(const SiteTensor& t) {
  bool real = true;
  for (const auto& s : t.slice)
    for (Eigen::Index j = 0; j < s.cols(); ++j)
      for (Eigen::Index i = 0; i < s.rows(); ++i)
        if (s(i, j).imag() != 0.0) real = false;
  json data = json::array();
  for (Eigen::Index a = 0; a < t.left_dim(); ++a)
    for (int s = 0; s < 2; ++s)
      for (Eigen::Index b = 0; b < t.right_dim(); ++b) {
        const cplx v = t(a, s, b);
        if (real) {
          data.push_back(v.real());
        } else {
          data.push_back(json::array({v.real(), v.imag()}));
        }
      }
  return json{{"shape", {t.left_dim(), 2, t.right_dim()}}, {"data", std::move(data)}};
}

cplx json_scalar(const json& v) {
  if (v.is_number()) return {v.get<double>(), 0.0};
  if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number())
    return {v[0].get<double>(), v[1].get<double>()};
  throw FormatError("expected a number or [re, im] pair");
}

}  // namespace

SiteTensor::SiteTensor(Eigen::Index left, Eigen::Index right)
    : slice{Matrix::Zero(left, right), Matrix::Zero(left, right)} {}

Matrix SiteTensor::left_matrix() const {
  const Eigen::Index l = left_dim();
  const Eigen::Index r = right_dim();
  Matrix m(2 * l, r);
  for (Eigen::Index a = 0; a < l; ++a) {
    m.row(2 * a) = slice[0].row(a);
    m.row(2 * a + 1) = slice[1].row(a);
  }
  return m;
}

Matrix SiteTensor::right_matrix() const {
  const Eigen::Index l = left_dim();
  const Eigen::Index r = right_dim();
  Matrix m(l, 2 * r);
  m.leftCols(r) = slice[0];
  m.rightCols(r) = slice[1];
  return m;
}

SiteTensor SiteTensor::from_left_matrix(const Matrix& m, Eigen::Index left) {
  SiteTensor t(left, m.cols());
  for (Eigen::Index a = 0; a < left; ++a) {
    t.slice[0].row(a) = m.row(2 * a);
    t.slice[1].row(a) = m.row(2 * a + 1);
  }
  return t;
}

SiteTensor SiteTensor::from_right_matrix(const Matrix& m, Eigen::Index right) {
  SiteTensor t(m.rows(), right);
  t.slice[0] = m.leftCols(right);
  t.slice[1] = m.rightCols(right);
  return t;
}

std::string_view to_string(CanonicalForm form) {
  switch (form) {
    case CanonicalForm::None: return "none";
    case CanonicalForm::Left: return "left";
    case CanonicalForm::Right: return "right";
  }
  return "none";
}

Mps::Mps(std::vector<SiteTensor> tensors, CanonicalForm form, int max_bond)
    : tensors_(std::move(tensors)), form_(form), max_bond_(max_bond) {
  if (tensors_.empty()) throw ValidationError("Mps: need at least one site");
  if (tensors_.front().left_dim() != 1 || tensors_.back().right_dim() != 1) {
    throw ValidationError("Mps: boundary bonds must have dimension 1");
  }
  for (std::size_t i = 0; i < tensors_.size(); ++i) {
    const auto& t = tensors_[i];
    if (t.slice[1].rows() != t.left_dim() || t.slice[1].cols() != t.right_dim()) {
      throw ValidationError("Mps: physical slices of site " + std::to_string(i) + " disagree in shape");
    }
    if (i + 1 < tensors_.size() && t.right_dim() != tensors_[i + 1].left_dim()) {
      throw ValidationError("Mps: bond mismatch between sites " + std::to_string(i) + " and " +
                            std::to_string(i + 1));
    }
  }
}

std::vector<int> Mps::bond_dims() const {
  std::vector<int> dims;
  dims.reserve(tensors_.size() + 1);
  for (const auto& t : tensors_) dims.push_back(static_cast<int>(t.left_dim()));
  dims.push_back(static_cast<int>(tensors_.back().right_dim()));
  return dims;
}

int Mps::largest_bond() const {
  const auto dims = bond_dims();
  return *std::max_element(dims.begin(), dims.end());
}

Mps Mps::basis_state(const std::vector<int>& bits) {
  std::vector<SiteTensor> t;
  t.reserve(bits.size());
  for (int b : bits) {
    if (b != 0 && b != 1) throw ValidationError("basis_state: bits must be 0 or 1");
    SiteTensor s(1, 1);
    s(0, b, 0) = 1.0;
    t.push_back(std::move(s));
  }
  return Mps(std::move(t), CanonicalForm::Left, 1);
}

double TruncationReport::total() const {
  double s = 0.0;
  for (double d : discarded) s += d;
  return s;
}

namespace mps {

MpsWithReport from_dense(const Vector& v_in, int chi_max, double eps_max) {
  const int n = exact_log2(v_in.size());
  if (n < 1) throw ValidationError("from_dense: length " + std::to_string(v_in.size()) + " is not 2^N with N >= 1");
  if (chi_max < 1) throw ValidationError("from_dense: chi_max must be >= 1");
  if (!(eps_max >= 0.0)) throw ValidationError("from_dense: eps_max must be >= 0");
  if (!linalg::all_finite(v_in)) throw NumericError("from_dense: non-finite amplitudes");
  const double nv = v_in.norm();
  if (!(nv > 0.0)) throw ValidationError("from_dense: zero vector");
  const Vector v = v_in / nv;

  TruncationReport report;
  report.discarded.assign(static_cast<std::size_t>(n), 0.0);
  std::vector<SiteTensor> tensors;
  tensors.reserve(static_cast<std::size_t>(n));

  // rest has rows (2 * bond + s_k) and columns indexing sites k+1..N-1.
  Eigen::Index bond = 1;
  Eigen::Index rest_cols = v.size() / 2;
  Matrix rest(2, rest_cols);
  for (Eigen::Index s = 0; s < 2; ++s) rest.row(s) = v.segment(s * rest_cols, rest_cols).transpose();

  for (int k = 0; k < n - 1; ++k) {
    auto f = linalg::svd(rest);
    const Cut cut = choose_cut(f.S, chi_max, eps_max);
    report.discarded[static_cast<std::size_t>(k + 1)] = cut.discarded;
    tensors.push_back(SiteTensor::from_left_matrix(f.U.leftCols(cut.keep), bond));

    const Matrix carry = f.S.head(cut.keep).cast<cplx>().asDiagonal() * f.V.leftCols(cut.keep).adjoint();
    bond = cut.keep;
    const Eigen::Index half = rest_cols / 2;
    Matrix next(2 * bond, half);
    for (Eigen::Index b = 0; b < bond; ++b) {
      next.row(2 * b) = carry.row(b).head(half);
      next.row(2 * b + 1) = carry.row(b).tail(half);
    }
    rest = std::move(next);
    rest_cols = half;
  }
  SiteTensor last = SiteTensor::from_left_matrix(rest, bond);
  const double nl = frob_norm(last);
  if (!(nl > 0.0)) throw NumericError("from_dense: state vanished under truncation");
  scale(last, 1.0 / nl);
  tensors.push_back(std::move(last));
  return {Mps(std::move(tensors), CanonicalForm::Left, chi_max), std::move(report)};
}

MpsWithReport from_dense(const AmplitudeState& s, int chi_max, double eps_max) {
  return from_dense(s.as_complex(), chi_max, eps_max);
}

Vector to_dense(const Mps& m, int dense_cap) {
  const int n = m.n_sites();
  if (n > dense_cap) {
    throw ValidationError("to_dense: " + std::to_string(n) + " sites exceeds dense cap " + std::to_string(dense_cap));
  }
  Matrix state = Matrix::Ones(1, 1);
  for (int k = 0; k < n; ++k) {
    const auto& t = m.site(k);
    const Matrix p0 = state * t.slice[0];
    const Matrix p1 = state * t.slice[1];
    Matrix next(2 * state.rows(), t.right_dim());
    for (Eigen::Index i = 0; i < state.rows(); ++i) {
      next.row(2 * i) = p0.row(i);
      next.row(2 * i + 1) = p1.row(i);
    }
    state = std::move(next);
  }
  return state.col(0);
}

MpsWithReport truncate(const Mps& m, int chi) {
  if (chi < 1) throw ValidationError("truncate: chi must be >= 1");
  const Mps rc = right_canonicalize(m);
  std::vector<SiteTensor> t = rc.tensors();
  const std::size_t n = t.size();
  TruncationReport report;
  report.discarded.assign(n, 0.0);
  for (std::size_t k = 0; k + 1 < n; ++k) {
    const Eigen::Index left = t[k].left_dim();
    auto f = linalg::svd(t[k].left_matrix());
    const Cut cut = choose_cut(f.S, chi, 0.0);
    report.discarded[k + 1] = cut.discarded;
    t[k] = SiteTensor::from_left_matrix(f.U.leftCols(cut.keep), left);
    const Matrix carry = f.S.head(cut.keep).cast<cplx>().asDiagonal() * f.V.leftCols(cut.keep).adjoint();
    for (auto& s : t[k + 1].slice) s = carry * s;
  }
  const double nl = frob_norm(t.back());
  if (!(nl > 0.0)) throw NumericError("truncate: state vanished");
  scale(t.back(), 1.0 / nl);
  return {Mps(std::move(t), CanonicalForm::Left, chi), std::move(report)};
}

cplx inner(const Mps& a, const Mps& b) {
  if (a.n_sites() != b.n_sites()) {
    throw ValidationError("inner: site count mismatch (" + std::to_string(a.n_sites()) + " vs " +
                          std::to_string(b.n_sites()) + ")");
  }
  Matrix e = Matrix::Ones(1, 1);
  for (int k = 0; k < a.n_sites(); ++k) {
    const auto& x = a.site(k);
    const auto& y = b.site(k);
    e = x.slice[0].adjoint() * e * y.slice[0] + x.slice[1].adjoint() * e * y.slice[1];
  }
  return e(0, 0);
}

double norm(const Mps& m) { return std::sqrt(std::max(inner(m, m).real(), 0.0)); }

Mps left_canonicalize(const Mps& m) {
  std::vector<SiteTensor> t = m.tensors();
  for (std::size_t k = 0; k + 1 < t.size(); ++k) qr_step_right(t, k);
  const double nl = frob_norm(t.back());
  if (!(nl > 0.0)) throw NumericError("left_canonicalize: zero state");
  scale(t.back(), 1.0 / nl);
  return Mps(std::move(t), CanonicalForm::Left, m.max_bond());
}

Mps right_canonicalize(const Mps& m) {
  std::vector<SiteTensor> t = m.tensors();
  for (std::size_t k = t.size() - 1; k > 0; --k) lq_step_left(t, k);
  const double nl = frob_norm(t.front());
  if (!(nl > 0.0)) throw NumericError("right_canonicalize: zero state");
  scale(t.front(), 1.0 / nl);
  return Mps(std::move(t), CanonicalForm::Right, m.max_bond());
}

double left_canonical_defect(const Mps& m) {
  double worst = 0.0;
  for (const auto& t : m.tensors()) worst = std::max(worst, linalg::isometry_defect(t.left_matrix()));
  return worst;
}

MpsWithReport apply_two_qubit_gate(const Mps& m, const Matrix4& gate, int site, int chi_max) {
  const int n = m.n_sites();
  if (site < 0 || site + 1 >= n) {
    throw ValidationError("apply_two_qubit_gate: sites (" + std::to_string(site) + "," + std::to_string(site + 1) +
                          ") are not an adjacent pair of a " + std::to_string(n) + "-site chain");
  }
  if (chi_max < 1) throw ValidationError("apply_two_qubit_gate: chi_max must be >= 1");
  if (linalg::unitarity_defect(gate) > 1e-10) throw ValidationError("apply_two_qubit_gate: gate is not unitary");

  std::vector<SiteTensor> t = m.tensors();
  const auto i = static_cast<std::size_t>(site);
  for (std::size_t k = 0; k < i; ++k) qr_step_right(t, k);
  for (std::size_t k = t.size() - 1; k > i + 1; --k) lq_step_left(t, k);

  const SiteTensor& a = t[i];
  const SiteTensor& b = t[i + 1];
  const Eigen::Index l = a.left_dim();
  const Eigen::Index r = b.right_dim();
  Matrix pair[2][2];
  for (int t1 = 0; t1 < 2; ++t1)
    for (int t2 = 0; t2 < 2; ++t2) pair[t1][t2] = a.slice[t1] * b.slice[t2];

  Matrix theta = Matrix::Zero(2 * l, 2 * r);
  for (int s1 = 0; s1 < 2; ++s1) {
    for (int s2 = 0; s2 < 2; ++s2) {
      Matrix block = Matrix::Zero(l, r);
      for (int t1 = 0; t1 < 2; ++t1)
        for (int t2 = 0; t2 < 2; ++t2) {
          const cplx g = gate(2 * s1 + s2, 2 * t1 + t2);
          if (g != cplx(0.0, 0.0)) block += g * pair[t1][t2];
        }
      for (Eigen::Index x = 0; x < l; ++x) theta.block(2 * x + s1, s2 * r, 1, r) = block.row(x);
    }
  }

  auto f = linalg::svd(theta);
  const double total = f.S.squaredNorm();
  if (!(total > 0.0)) throw NumericError("apply_two_qubit_gate: state vanished");
  const Cut cut = choose_cut(f.S, chi_max, 0.0);
  const double kept = total - cut.discarded;
  t[i] = SiteTensor::from_left_matrix(f.U.leftCols(cut.keep), l);
  const Matrix sv = (f.S.head(cut.keep) / std::sqrt(kept)).cast<cplx>().asDiagonal() *
                    f.V.leftCols(cut.keep).adjoint();
  t[i + 1] = SiteTensor::from_right_matrix(sv, r);

  TruncationReport report;
  report.discarded.assign(static_cast<std::size_t>(n), 0.0);
  report.discarded[i + 1] = cut.discarded / total;
  return {Mps(std::move(t), CanonicalForm::None, std::max(chi_max, m.max_bond())), std::move(report)};
}

std::string to_json(const Mps& m, BitOrdering ordering) {
  json tensors = json::array();
  for (const auto& t : m.tensors()) tensors.push_back(tensor_to_json(t));
  json doc{{"format", "tnload-mps"},
           {"version", 1},
           {"n_sites", m.n_sites()},
           {"bond_dims", m.bond_dims()},
           {"canonical_form", std::string(to_string(m.canonical_form()))},
           {"max_bond", m.max_bond()},
           {"ordering", std::string(to_string(ordering))},
           {"tensors", std::move(tensors)}};
  return doc.dump(1);
}

MpsFile from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw FormatError(std::string("mps json: ") + e.what());
  }
  try {
    if (doc.at("format").get<std::string>() != "tnload-mps") throw FormatError("mps json: wrong format tag");
    if (doc.at("version").get<int>() != 1) throw FormatError("mps json: unsupported version");
    const auto form_name = doc.at("canonical_form").get<std::string>();
    CanonicalForm form = CanonicalForm::None;
    if (form_name == "left") form = CanonicalForm::Left;
    else if (form_name == "right") form = CanonicalForm::Right;
    else if (form_name != "none") throw FormatError("mps json: unknown canonical form");

    std::vector<SiteTensor> tensors;
    for (const auto& jt : doc.at("tensors")) {
      const auto shape = jt.at("shape").get<std::vector<long>>();
      if (shape.size() != 3 || shape[1] != 2 || shape[0] < 1 || shape[2] < 1)
        throw FormatError("mps json: bad tensor shape");
      const auto& data = jt.at("data");
      if (data.size() != static_cast<std::size_t>(shape[0] * 2 * shape[2]))
        throw FormatError("mps json: tensor data length does not match shape");
      SiteTensor t(shape[0], shape[2]);
      std::size_t idx = 0;
      for (long a = 0; a < shape[0]; ++a)
        for (int s = 0; s < 2; ++s)
          for (long b = 0; b < shape[2]; ++b) t(a, s, b) = json_scalar(data[idx++]);
      tensors.push_back(std::move(t));
    }
    if (static_cast<int>(tensors.size()) != doc.at("n_sites").get<int>())
      throw FormatError("mps json: n_sites does not match tensor count");
    MpsFile out{Mps(std::move(tensors), form, doc.at("max_bond").get<int>()),
                parse_ordering(doc.value("ordering", std::string("interleaved-straight")))};
    return out;
  } catch (const json::exception& e) {
    throw FormatError(std::string("mps json: ") + e.what());
  } catch (const ValidationError& e) {
    throw FormatError(std::string("mps json: ") + e.what());
  }
}

}  // namespace mps
}  // namespace tnload
