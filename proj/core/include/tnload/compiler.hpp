#pragma once

#include <functional>
#include <ostream>
#include <vector>

#include "tnload/circuit.hpp"
#include "tnload/mps.hpp"
#include "tnload/simulator.hpp"

namespace tnload {

/// 4x4 environment of gate m: with gate m replaced by W, the circuit-target
/// overlap <target| C |0...0> equals Tr[W F].
struct EnvironmentTensor {
  int gate_index = 0;
  int site = 0;
  Matrix4 F = Matrix4::Zero();

  cplx overlap_with(const Matrix4& w) const { return (w * F).trace(); }
};

struct TraceRow {
  int stage = 0;   // circuit depth while this row was recorded
  int sweep = 0;   // 0 = before any sweep at this stage
  double overlap = 0.0;
};

struct OptimizerTrace {
  std::vector<TraceRow> rows;
  /// Overlap after every single gate update, in visiting order.
  std::vector<double> update_overlaps;
  int sweep_count = 0;
  int layer_count = 0;

  double final_overlap() const { return rows.empty() ? 0.0 : rows.back().overlap; }
};

struct CompileResult {
  LayeredCircuit circuit;
  OptimizerTrace trace;
};

/// Working bond cap for residual states.
inline constexpr int kDefaultWorkingChi = 32;
inline constexpr int kDefaultSweeps = 200;

struct SweepOptions {
  int n_sweeps = kDefaultSweeps;
  /// Stop early once a full sweep improves the overlap by less than this
  /// relative amount. Zero disables early stopping.
  double relative_cutoff = 0.0;
  int dense_cap = kDefaultDenseCap;
};

namespace compiler {

/// Layer-by-layer disentangling construction. The layer extracted at
/// iteration i prepares the chi=2 truncation of U_{i-1}^dag ... U_1^dag |target>
/// and becomes the innermost layer, so the returned circuit reads
/// U_1 U_2 ... U_D |0> in prepared-state order.
CompileResult iterative_construct(const Mps& target, int depth, int chi_max = kDefaultWorkingChi,
                                  int dense_cap = kDefaultDenseCap);

/// Environment of gate m (0-based, global application order).
EnvironmentTensor environment_tensor(const LayeredCircuit& c, int m, const StateVector& target);
EnvironmentTensor environment_tensor(const LayeredCircuit& c, int m, const Mps& target,
                                     int dense_cap = kDefaultDenseCap);

/// Unitary maximizing |Tr[W F]|: with F = U S V^dag, W = V U^dag, giving
/// Tr[W F] = sum(S) real and nonnegative.
Matrix4 update_gate(const EnvironmentTensor& env);

/// Overlap of the circuit-prepared state with the target, <target|C|0>.
double circuit_overlap(const LayeredCircuit& c, const StateVector& target);

/// Gate-by-gate sweeps in forward application order.
CompileResult sweep_optimize(const LayeredCircuit& c, const Mps& target, const SweepOptions& options = {});
CompileResult sweep_optimize(const LayeredCircuit& c, const StateVector& target, const SweepOptions& options = {},
                             int stage = 0);

using StageCallback = std::function<void(int depth, const LayeredCircuit& optimized)>;

/// Grow by one disentangling layer at a time, re-optimizing every layer after
/// each addition. `on_stage` sees the optimized circuit at every depth.
CompileResult grow_and_optimize(const Mps& target, int depth, const SweepOptions& options = {},
                                int chi_max = kDefaultWorkingChi, const StageCallback& on_stage = {});

/// CSV: stage,sweep,overlap,infidelity
void write_trace_csv(std::ostream& out, const OptimizerTrace& trace, std::span<const std::string> header = {});

}  // namespace compiler
}  // namespace tnload
