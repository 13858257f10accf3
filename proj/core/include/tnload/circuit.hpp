#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "tnload/mps.hpp"
#include "tnload/types.hpp"

namespace tnload {

/// 4x4 unitary acting on qubits (site, site + 1). Matrix basis index is
/// 2 * q_site + q_{site+1}.
struct TwoQubitGate {
  int site = 0;
  Matrix4 matrix = Matrix4::Identity();

  TwoQubitGate adjoint() const { return {site, matrix.adjoint()}; }
  bool is_real() const { return matrix.imag().isZero(0.0); }
  friend bool operator==(const TwoQubitGate& a, const TwoQubitGate& b) {
    return a.site == b.site && a.matrix == b.matrix;
  }
};

/// N-1 gates, one per adjacent pair, in application order.
class CircuitLayer {
 public:
  CircuitLayer() = default;
  CircuitLayer(int n_qubits, std::vector<TwoQubitGate> gates);

  /// Identity gates in the default staircase order (N-2, N-1) ... (0, 1).
  static CircuitLayer identity(int n_qubits);

  int n_qubits() const { return n_qubits_; }
  const std::vector<TwoQubitGate>& gates() const { return gates_; }
  std::vector<TwoQubitGate>& mutable_gates() { return gates_; }

  friend bool operator==(const CircuitLayer&, const CircuitLayer&) = default;

 private:
  int n_qubits_ = 0;
  std::vector<TwoQubitGate> gates_;
};

struct Provenance {
  std::string target_hash;
  int chi = 0;
  std::vector<double> history;
  std::map<std::string, std::string> extra;

  friend bool operator==(const Provenance&, const Provenance&) = default;
};

/// Layers in application order: layers()[0] acts on |0...0> first, so the
/// prepared state is L_{D-1} ... L_1 L_0 |0...0>.
class LayeredCircuit {
 public:
  LayeredCircuit() = default;
  LayeredCircuit(int n_qubits, std::vector<CircuitLayer> layers, Provenance provenance = {});

  int n_qubits() const { return n_qubits_; }
  int depth() const { return static_cast<int>(layers_.size()); }
  const std::vector<CircuitLayer>& layers() const { return layers_; }
  const Provenance& provenance() const { return provenance_; }
  Provenance& mutable_provenance() { return provenance_; }

  /// Total gate count M = D * (N - 1).
  int gate_count() const;
  /// Gate m (0-based) in global application order.
  const TwoQubitGate& gate(int m) const;
  void set_gate(int m, const Matrix4& matrix);
  /// All gates flattened in application order.
  std::vector<TwoQubitGate> flat_gates() const;

  void prepend_layer(CircuitLayer layer);
  void append_layer(CircuitLayer layer);

  friend bool operator==(const LayeredCircuit&, const LayeredCircuit&) = default;

 private:
  int n_qubits_ = 0;
  std::vector<CircuitLayer> layers_;
  Provenance provenance_;
};

namespace circuit {

/// Complete an isometry (dn x m, orthonormal columns) to a dn x dn unitary
/// whose leading m columns are V. Remaining columns come from canonical basis
/// vectors, tried in index order, orthogonalized twice by Gram-Schmidt.
Matrix embed_isometry(const Matrix& v);

/// Exact single-layer preparation circuit for a left-canonical MPS whose
/// bonds are all at most 2.
CircuitLayer layer_from_chi2_mps(const Mps& m);

LayeredCircuit adjoint(const LayeredCircuit& c);

/// CNOT-equivalent cost: two per staircase gate, 2 * D * (N - 1).
long cnot_count(const LayeredCircuit& c);
long cnot_count(int n_qubits, int depth);

struct SerializeOptions {
  /// Append a hex-encoded little-endian copy of every matrix entry; readers
  /// prefer it over the decimal fields when present.
  bool include_binary = false;
};

inline constexpr int kCircuitFormatVersion = 1;

std::string serialize(const LayeredCircuit& c, SerializeOptions options = {});
LayeredCircuit deserialize(const std::string& text);

/// Flat list {gate, layer, site, matrix} in application order.
std::string export_gate_list(const LayeredCircuit& c);

}  // namespace circuit
}  // namespace tnload
