#include "tnload/circuit.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>

#include <json.hpp>

#include "tnload/linalg.hpp"

namespace tnload {

namespace {

using json = nlohmann::json;

json matrix_to_json(const Matrix4& m) {
  const bool real = m.imag().isZero(0.0);
  json rows = json::array();
  for (int i = 0; i < 4; ++i) {
    json row = json::array();
    for (int j = 0; j < 4; ++j) {
      if (real) {
        row.push_back(m(i, j).real());
      } else {
        row.push_back(json::array({m(i, j).real(), m(i, j).imag()}));
      }
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix4 matrix_from_json(const json& rows) {
  if (!rows.is_array() || rows.size() != 4) throw FormatError("circuit json: matrix must have 4 rows");
  Matrix4 m;
  for (int i = 0; i < 4; ++i) {
    const auto& row = rows[static_cast<std::size_t>(i)];
    if (!row.is_array() || row.size() != 4) throw FormatError("circuit json: matrix row must have 4 entries");
    for (int j = 0; j < 4; ++j) {
      const auto& v = row[static_cast<std::size_t>(j)];
      if (v.is_number()) {
        m(i, j) = cplx(v.get<double>(), 0.0);
      } else if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number()) {
        m(i, j) = cplx(v[0].get<double>(), v[1].get<double>());
      } else {
        throw FormatError("circuit json: matrix entry must be a number or [re, im]");
      }
    }
  }
  return m;
}

constexpr char kHex[] = "0123456789abcdef";

void append_le_double(std::string& hex, double v) {
  std::uint64_t bits = std::bit_cast<std::uint64_t>(v);
  for (int byte = 0; byte < 8; ++byte) {
    const unsigned b = static_cast<unsigned>(bits & 0xffu);
    hex.push_back(kHex[b >> 4]);
    hex.push_back(kHex[b & 0xfu]);
    bits >>= 8;
  }
}

int hex_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  throw FormatError("circuit json: corrupt binary block");
}

double read_le_double(const std::string& hex, std::size_t offset) {
  std::uint64_t bits = 0;
  for (int byte = 7; byte >= 0; --byte) {
    const std::size_t p = offset + static_cast<std::size_t>(byte) * 2;
    bits = (bits << 8) | static_cast<std::uint64_t>(hex_value(hex[p]) << 4 | hex_value(hex[p + 1]));
  }
  return std::bit_cast<double>(bits);
}

}  // namespace

CircuitLayer::CircuitLayer(int n_qubits, std::vector<TwoQubitGate> gates)
    : n_qubits_(n_qubits), gates_(std::move(gates)) {
  if (n_qubits_ < 2) throw ValidationError("CircuitLayer: need at least 2 qubits");
  if (gates_.size() != static_cast<std::size_t>(n_qubits_ - 1)) {
    throw ValidationError("CircuitLayer: expected " + std::to_string(n_qubits_ - 1) + " gates, got " +
                          std::to_string(gates_.size()));
  }
  std::vector<bool> seen(static_cast<std::size_t>(n_qubits_ - 1), false);
  for (const auto& g : gates_) {
    if (g.site < 0 || g.site >= n_qubits_ - 1) throw ValidationError("CircuitLayer: gate site out of range");
    if (seen[static_cast<std::size_t>(g.site)]) throw ValidationError("CircuitLayer: two gates on the same pair");
    seen[static_cast<std::size_t>(g.site)] = true;
  }
}

CircuitLayer CircuitLayer::identity(int n_qubits) {
  std::vector<TwoQubitGate> gates;
  for (int s = n_qubits - 2; s >= 0; --s) gates.push_back({s, Matrix4::Identity()});
  return CircuitLayer(n_qubits, std::move(gates));
}

LayeredCircuit::LayeredCircuit(int n_qubits, std::vector<CircuitLayer> layers, Provenance provenance)
    : n_qubits_(n_qubits), layers_(std::move(layers)), provenance_(std::move(provenance)) {
  if (layers_.empty()) throw ValidationError("LayeredCircuit: need at least one layer");
  for (const auto& l : layers_)
    if (l.n_qubits() != n_qubits_) throw ValidationError("LayeredCircuit: layer qubit count mismatch");
}

int LayeredCircuit::gate_count() const { return depth() * (n_qubits_ - 1); }

const TwoQubitGate& LayeredCircuit::gate(int m) const {
  if (m < 0 || m >= gate_count()) throw ValidationError("gate index " + std::to_string(m) + " out of range");
  const int per = n_qubits_ - 1;
  return layers_[static_cast<std::size_t>(m / per)].gates()[static_cast<std::size_t>(m % per)];
}

void LayeredCircuit::set_gate(int m, const Matrix4& matrix) {
  if (m < 0 || m >= gate_count()) throw ValidationError("gate index " + std::to_string(m) + " out of range");
  const int per = n_qubits_ - 1;
  layers_[static_cast<std::size_t>(m / per)].mutable_gates()[static_cast<std::size_t>(m % per)].matrix = matrix;
}

std::vector<TwoQubitGate> LayeredCircuit::flat_gates() const {
  std::vector<TwoQubitGate> out;
  out.reserve(static_cast<std::size_t>(gate_count()));
  for (const auto& l : layers_) out.insert(out.end(), l.gates().begin(), l.gates().end());
  return out;
}

void LayeredCircuit::prepend_layer(CircuitLayer layer) {
  if (layer.n_qubits() != n_qubits_) throw ValidationError("prepend_layer: qubit count mismatch");
  layers_.insert(layers_.begin(), std::move(layer));
}

void LayeredCircuit::append_layer(CircuitLayer layer) {
  if (layer.n_qubits() != n_qubits_) throw ValidationError("append_layer: qubit count mismatch");
  layers_.push_back(std::move(layer));
}

namespace circuit {

Matrix embed_isometry(const Matrix& v) {
  const Eigen::Index dn = v.rows();
  const Eigen::Index m = v.cols();
  if (m < 1 || m > dn) throw ValidationError("embed_isometry: need 1 <= columns <= rows");
  if (linalg::isometry_defect(v) > 1e-10) throw ValidationError("embed_isometry: columns are not orthonormal");

  Matrix u(dn, dn);
  u.leftCols(m) = v;
  Eigen::Index filled = m;
  // Some basis vector always keeps at least 1/sqrt(dn) of its norm after
  // projection, so this threshold is always reachable.
  const double threshold = 0.5 / std::sqrt(static_cast<double>(dn));
  for (Eigen::Index j = 0; j < dn && filled < dn; ++j) {
    Vector w = Vector::Unit(dn, j);
    for (int pass = 0; pass < 2; ++pass) {
      const auto q = u.leftCols(filled);
      w -= q * (q.adjoint() * w);
    }
    const double nw = w.norm();
    if (nw < threshold) continue;
    u.col(filled++) = w / nw;
  }
  if (filled != dn) throw NumericError("embed_isometry: completion failed");
  return u;
}

CircuitLayer layer_from_chi2_mps(const Mps& m) {
  const int n = m.n_sites();
  if (n < 2) throw ValidationError("layer_from_chi2_mps: need at least 2 sites");
  if (m.largest_bond() > 2) {
    throw ValidationError("layer_from_chi2_mps: bond dimension " + std::to_string(m.largest_bond()) + " exceeds 2");
  }
  if (mps::left_canonical_defect(m) > 1e-10) throw ValidationError("layer_from_chi2_mps: MPS is not left-canonical");

  std::vector<TwoQubitGate> gates;
  gates.reserve(static_cast<std::size_t>(n - 1));
  // Site k (k >= 2) is realized by the gate on (k-1, k): qubit k-1 carries the
  // left bond out, qubit k enters holding the right bond.
  for (int k = n - 1; k >= 2; --k) {
    const Matrix a = m.site(k).left_matrix();
    Matrix v = Matrix::Zero(4, a.cols());
    v.topRows(a.rows()) = a;
    gates.push_back({k - 1, embed_isometry(v)});
  }
  // Sites 0 and 1 fuse into the last gate, on (0, 1).
  const auto& s0 = m.site(0);
  const auto& s1 = m.site(1);
  Matrix fused(4, s1.right_dim());
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) fused.row(2 * a + b) = s0.slice[a].row(0) * s1.slice[b];
  gates.push_back({0, embed_isometry(fused)});
  return CircuitLayer(n, std::move(gates));
}

LayeredCircuit adjoint(const LayeredCircuit& c) {
  std::vector<CircuitLayer> layers;
  layers.reserve(c.layers().size());
  for (auto it = c.layers().rbegin(); it != c.layers().rend(); ++it) {
    std::vector<TwoQubitGate> gates;
    for (auto g = it->gates().rbegin(); g != it->gates().rend(); ++g) gates.push_back(g->adjoint());
    layers.emplace_back(c.n_qubits(), std::move(gates));
  }
  return LayeredCircuit(c.n_qubits(), std::move(layers), c.provenance());
}

long cnot_count(int n_qubits, int depth) { return 2L * depth * (n_qubits - 1); }

long cnot_count(const LayeredCircuit& c) { return cnot_count(c.n_qubits(), c.depth()); }

std::string serialize(const LayeredCircuit& c, SerializeOptions options) {
  json layers = json::array();
  for (const auto& l : c.layers()) {
    json gates = json::array();
    for (const auto& g : l.gates()) gates.push_back({{"site", g.site}, {"matrix", matrix_to_json(g.matrix)}});
    layers.push_back(std::move(gates));
  }
  const auto& p = c.provenance();
  json extra = json::object();
  for (const auto& [k, v] : p.extra) extra[k] = v;
  json doc{{"format", "tnload-circuit"},
           {"version", kCircuitFormatVersion},
           {"n_qubits", c.n_qubits()},
           {"layers", std::move(layers)},
           {"provenance",
            {{"target_hash", p.target_hash}, {"chi", p.chi}, {"history", p.history}, {"extra", std::move(extra)}}}};
  if (options.include_binary) {
    std::string hex;
    hex.reserve(static_cast<std::size_t>(c.gate_count()) * 16 * 2 * 16);
    for (const auto& g : c.flat_gates())
      for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
          append_le_double(hex, g.matrix(i, j).real());
          append_le_double(hex, g.matrix(i, j).imag());
        }
    doc["binary"] = std::move(hex);
  }
  return doc.dump(1) + "\n";
}

LayeredCircuit deserialize(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw FormatError(std::string("circuit json: ") + e.what());
  }
  try {
    if (doc.at("format").get<std::string>() != "tnload-circuit") throw FormatError("circuit json: wrong format tag");
    const int version = doc.at("version").get<int>();
    if (version != kCircuitFormatVersion) {
      throw FormatError("circuit json: version " + std::to_string(version) + " is not supported (expected " +
                        std::to_string(kCircuitFormatVersion) + ")");
    }
    const int n = doc.at("n_qubits").get<int>();
    const auto& jl = doc.at("layers");
    if (!jl.is_array() || jl.empty()) throw FormatError("circuit json: no layers");

    std::vector<CircuitLayer> layers;
    for (const auto& layer : jl) {
      if (!layer.is_array() || layer.empty()) throw FormatError("circuit json: empty layer");
      std::vector<TwoQubitGate> gates;
      for (const auto& g : layer) gates.push_back({g.at("site").get<int>(), matrix_from_json(g.at("matrix"))});
      layers.emplace_back(n, std::move(gates));
    }

    Provenance p;
    if (doc.contains("provenance")) {
      const auto& jp = doc.at("provenance");
      p.target_hash = jp.value("target_hash", std::string());
      p.chi = jp.value("chi", 0);
      p.history = jp.value("history", std::vector<double>{});
      if (jp.contains("extra"))
        for (const auto& [k, v] : jp.at("extra").items()) p.extra[k] = v.get<std::string>();
    }
    LayeredCircuit c(n, std::move(layers), std::move(p));

    if (doc.contains("binary")) {
      const auto hex = doc.at("binary").get<std::string>();
      const std::size_t per_gate = 16 * 2 * 16;
      if (hex.size() != per_gate * static_cast<std::size_t>(c.gate_count())) {
        throw FormatError("circuit json: corrupt binary block (length mismatch)");
      }
      for (int m = 0; m < c.gate_count(); ++m) {
        Matrix4 u;
        std::size_t off = per_gate * static_cast<std::size_t>(m);
        for (int i = 0; i < 4; ++i)
          for (int j = 0; j < 4; ++j) {
            const double re = read_le_double(hex, off);
            const double im = read_le_double(hex, off + 16);
            off += 32;
            u(i, j) = cplx(re, im);
          }
        if ((u - c.gate(m).matrix).cwiseAbs().maxCoeff() > 1e-12) {
          throw FormatError("circuit json: binary block disagrees with decimal matrices");
        }
        c.set_gate(m, u);
      }
    }
    return c;
  } catch (const json::exception& e) {
    throw FormatError(std::string("circuit json: ") + e.what());
  } catch (const ValidationError& e) {
    throw FormatError(std::string("circuit json: ") + e.what());
  }
}

std::string export_gate_list(const LayeredCircuit& c) {
  json gates = json::array();
  int index = 0;
  for (int l = 0; l < c.depth(); ++l)
    for (const auto& g : c.layers()[static_cast<std::size_t>(l)].gates())
      gates.push_back({{"gate", index++}, {"layer", l}, {"site", g.site}, {"matrix", matrix_to_json(g.matrix)}});
  json doc{{"format", "tnload-gates"}, {"version", kCircuitFormatVersion}, {"n_qubits", c.n_qubits()},
           {"gates", std::move(gates)}};
  return doc.dump(1) + "\n";
}

}  // namespace circuit
}  // namespace tnload
