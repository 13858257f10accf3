#include "tnload/compiler.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <optional>

#include "tnload/linalg.hpp"

namespace tnload::compiler {

namespace {

// F(b, a) = sum over the untouched qubits of psi[b, rest] * conj(phi[a, rest]),
// with a, b the 2-bit index 2 * q_site + q_{site+1}.
Matrix4 reduced_outer(const Vector& psi, const Vector& phi, int site, int n_qubits) {
  const int low = n_qubits - 2 - site;
  const std::uint64_t low_mask = (std::uint64_t{1} << low) - 1;
  const std::uint64_t b_low = std::uint64_t{1} << low;
  const std::uint64_t b_high = b_low << 1;
  const std::uint64_t blocks = std::uint64_t{1} << (n_qubits - 2);
  const cplx* x = psi.data();
  const cplx* y = phi.data();
  Matrix4 f = Matrix4::Zero();
  for (std::uint64_t i = 0; i < blocks; ++i) {
    const std::uint64_t base = ((i & ~low_mask) << 2) | (i & low_mask);
    const std::uint64_t idx[4] = {base, base | b_low, base | b_high, base | b_high | b_low};
    cplx xs[4], ys[4];
    for (int k = 0; k < 4; ++k) {
      xs[k] = x[idx[k]];
      ys[k] = std::conj(y[idx[k]]);
    }
    for (int b = 0; b < 4; ++b)
      for (int a = 0; a < 4; ++a) f(b, a) += xs[b] * ys[a];
  }
  return f;
}

void require_unit_norm(const Mps& target, const char* who) {
  const double n = mps::norm(target);
  if (std::abs(n - 1.0) > 1e-8) {
    throw ValidationError(std::string(who) + ": target is not unit norm (|psi| = " + std::to_string(n) + ")");
  }
}

StateVector dense_target(const Mps& target, int dense_cap) {
  return StateVector(target.n_sites(), mps::to_dense(target, dense_cap));
}

// Applies C^dagger to an MPS, gate by gate, with the bond capped at chi_max.
Mps apply_adjoint(const LayeredCircuit& c, Mps state, int chi_max) {
  const auto gates = c.flat_gates();
  for (auto it = gates.rbegin(); it != gates.rend(); ++it) {
    state = mps::apply_two_qubit_gate(state, it->matrix.adjoint(), it->site, chi_max).mps;
  }
  return state;
}

CircuitLayer disentangling_layer(const Mps& residual) {
  return circuit::layer_from_chi2_mps(mps::truncate(residual, 2).mps);
}

}  // namespace

double circuit_overlap(const LayeredCircuit& c, const StateVector& target) {
  if (c.n_qubits() != target.n_qubits()) throw ValidationError("circuit_overlap: qubit count mismatch");
  StateVector v(c.n_qubits(), 62);
  v.apply(c);
  return sim::overlap(target, v);
}

CompileResult iterative_construct(const Mps& target, int depth, int chi_max, int dense_cap) {
  if (depth < 1) throw ValidationError("iterative_construct: depth must be >= 1");
  if (chi_max < 2) throw ValidationError("iterative_construct: working bond cap must be >= 2");
  if (target.n_sites() < 2) throw ValidationError("iterative_construct: need at least 2 qubits");
  require_unit_norm(target, "iterative_construct");

  const int n = target.n_sites();
  const bool dense = n <= dense_cap;
  std::optional<StateVector> t;
  if (dense) t = dense_target(target, dense_cap);

  std::vector<CircuitLayer> extracted;
  OptimizerTrace trace;
  Mps residual = target;
  for (int i = 1; i <= depth; ++i) {
    CircuitLayer layer = disentangling_layer(residual);
    extracted.push_back(layer);
    std::vector<CircuitLayer> applied(extracted.rbegin(), extracted.rend());
    LayeredCircuit partial(n, std::move(applied));

    if (i < depth || !dense) {
      // Residual for the next layer: U_i^dag ... U_1^dag |target>.
      residual = apply_adjoint(LayeredCircuit(n, {layer}), residual, chi_max);
    }
    double ov = 0.0;
    if (dense) {
      ov = circuit_overlap(partial, *t);
    } else {
      // Without the dense target the residual's |0...0> component is the overlap.
      ov = std::abs(mps::inner(Mps::basis_state(std::vector<int>(static_cast<std::size_t>(n), 0)), residual));
    }
    trace.rows.push_back({i, 0, ov});
  }

  std::vector<CircuitLayer> applied(extracted.rbegin(), extracted.rend());
  Provenance p;
  p.chi = chi_max;
  for (const auto& r : trace.rows) p.history.push_back(r.overlap);
  p.extra["method"] = "iterative";
  trace.layer_count = depth;
  return {LayeredCircuit(n, std::move(applied), std::move(p)), std::move(trace)};
}

EnvironmentTensor environment_tensor(const LayeredCircuit& c, int m, const StateVector& target) {
  if (c.n_qubits() != target.n_qubits()) throw ValidationError("environment_tensor: qubit count mismatch");
  if (m < 0 || m >= c.gate_count()) {
    throw ValidationError("environment_tensor: gate index " + std::to_string(m) + " outside [0," +
                          std::to_string(c.gate_count()) + ")");
  }
  const int n = c.n_qubits();
  const auto gates = c.flat_gates();
  StateVector ket(n, 62);
  for (int k = 0; k < m; ++k) ket.apply(gates[static_cast<std::size_t>(k)]);
  StateVector bra = target;
  for (int k = c.gate_count() - 1; k > m; --k) bra.apply(gates[static_cast<std::size_t>(k)].adjoint());
  const int site = gates[static_cast<std::size_t>(m)].site;
  return {m, site, reduced_outer(ket.amplitudes(), bra.amplitudes(), site, n)};
}

EnvironmentTensor environment_tensor(const LayeredCircuit& c, int m, const Mps& target, int dense_cap) {
  return environment_tensor(c, m, dense_target(target, dense_cap));
}

Matrix4 update_gate(const EnvironmentTensor& env) {
  if (!linalg::all_finite(env.F)) throw NumericError("update_gate: environment has non-finite entries");
  const auto f = linalg::svd(env.F);
  return f.V * f.U.adjoint();
}

CompileResult sweep_optimize(const LayeredCircuit& c, const StateVector& target, const SweepOptions& options,
                             int stage) {
  if (c.n_qubits() != target.n_qubits()) throw ValidationError("sweep_optimize: qubit count mismatch");
  if (options.n_sweeps < 0) throw ValidationError("sweep_optimize: negative sweep count");
  if (c.n_qubits() > options.dense_cap) throw ValidationError("sweep_optimize: qubit count exceeds dense cap");
  if (stage <= 0) stage = c.depth();

  const int n = c.n_qubits();
  const int total = c.gate_count();
  LayeredCircuit out = c;
  std::vector<TwoQubitGate> gates = out.flat_gates();

  OptimizerTrace trace;
  trace.layer_count = c.depth();
  double current = circuit_overlap(out, target);
  trace.rows.push_back({stage, 0, current});

  for (int sweep = 1; sweep <= options.n_sweeps; ++sweep) {
    StateVector ket(n, 62);
    StateVector bra = target;
    for (int k = total - 1; k > 0; --k) bra.apply(gates[static_cast<std::size_t>(k)].adjoint());

    const double before = current;
    for (int m = 0; m < total; ++m) {
      auto& g = gates[static_cast<std::size_t>(m)];
      EnvironmentTensor env{m, g.site, reduced_outer(ket.amplitudes(), bra.amplitudes(), g.site, n)};
      const auto f = linalg::svd(env.F);
      g.matrix = f.V * f.U.adjoint();
      current = f.S.sum();
      trace.update_overlaps.push_back(current);
      ket.apply(g);
      if (m + 1 < total) bra.apply(gates[static_cast<std::size_t>(m + 1)]);
    }
    trace.rows.push_back({stage, sweep, current});
    ++trace.sweep_count;
    if (options.relative_cutoff > 0.0 && current - before <= options.relative_cutoff * std::max(before, 1e-300)) break;
  }
  for (int m = 0; m < total; ++m) out.set_gate(m, gates[static_cast<std::size_t>(m)].matrix);
  auto& p = out.mutable_provenance();
  for (const auto& r : trace.rows) p.history.push_back(r.overlap);
  return {std::move(out), std::move(trace)};
}

CompileResult sweep_optimize(const LayeredCircuit& c, const Mps& target, const SweepOptions& options) {
  if (c.n_qubits() != target.n_sites()) throw ValidationError("sweep_optimize: qubit count mismatch");
  return sweep_optimize(c, dense_target(target, options.dense_cap), options, c.depth());
}

CompileResult grow_and_optimize(const Mps& target, int depth, const SweepOptions& options, int chi_max,
                                const StageCallback& on_stage) {
  if (depth < 1) throw ValidationError("grow_and_optimize: depth must be >= 1");
  if (chi_max < 2) throw ValidationError("grow_and_optimize: working bond cap must be >= 2");
  if (target.n_sites() < 2) throw ValidationError("grow_and_optimize: need at least 2 qubits");
  require_unit_norm(target, "grow_and_optimize");

  const int n = target.n_sites();
  const StateVector t = dense_target(target, options.dense_cap);
  OptimizerTrace trace;
  std::optional<LayeredCircuit> current;
  for (int d = 1; d <= depth; ++d) {
    if (!current) {
      current = LayeredCircuit(n, {disentangling_layer(target)});
    } else {
      const Mps residual = apply_adjoint(*current, target, chi_max);
      current->prepend_layer(disentangling_layer(residual));
    }
    auto stage = sweep_optimize(*current, t, options, d);
    current = std::move(stage.circuit);
    trace.rows.insert(trace.rows.end(), stage.trace.rows.begin(), stage.trace.rows.end());
    trace.update_overlaps.insert(trace.update_overlaps.end(), stage.trace.update_overlaps.begin(),
                                 stage.trace.update_overlaps.end());
    trace.sweep_count += stage.trace.sweep_count;
    if (on_stage) on_stage(d, *current);
  }
  trace.layer_count = depth;
  Provenance p = current->provenance();
  p.chi = chi_max;
  p.history.clear();
  for (const auto& r : trace.rows) p.history.push_back(r.overlap);
  p.extra["method"] = "grow";
  p.extra["sweeps_per_stage"] = std::to_string(options.n_sweeps);
  current->mutable_provenance() = std::move(p);
  return {std::move(*current), std::move(trace)};
}

void write_trace_csv(std::ostream& out, const OptimizerTrace& trace, std::span<const std::string> header) {
  for (const auto& line : header) out << "# " << line << "\n";
  out << "stage,sweep,overlap,infidelity\n";
  out << std::setprecision(17);
  for (const auto& r : trace.rows) {
    out << r.stage << ',' << r.sweep << ',' << r.overlap << ',' << std::clamp(1.0 - r.overlap, 0.0, 1.0) << "\n";
  }
}

}  // namespace tnload::compiler
