#pragma once

#include <cstdint>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "tnload/circuit.hpp"
#include "tnload/types.hpp"

namespace tnload {

/// Dense state over N qubits; qubit 0 is the most significant index bit.
class StateVector {
 public:
  explicit StateVector(int n_qubits, int dense_cap = kDefaultDenseCap);
  StateVector(int n_qubits, Vector amplitudes);

  /// |0...0>
  static StateVector zero(int n_qubits) { return StateVector(n_qubits); }

  int n_qubits() const { return n_qubits_; }
  const Vector& amplitudes() const { return amps_; }
  double norm() const { return amps_.norm(); }
  std::vector<double> probabilities() const;

  void apply(const TwoQubitGate& g);
  void apply(const Matrix4& u, int site);
  void apply(const CircuitLayer& layer);
  void apply(const LayeredCircuit& c);

 private:
  int n_qubits_;
  Vector amps_;
};

struct ShotHistogram {
  int n_qubits = 0;
  std::vector<std::uint64_t> counts;
  std::uint64_t shots = 0;
  std::uint64_t seed = 0;
};

/// Identifies the sampler so histograms can be reproduced elsewhere.
inline constexpr const char* kSamplerAlgorithm = "mt19937_64/inverse-cdf/53-bit-uniform";

namespace sim {

StateVector run(const LayeredCircuit& c, int dense_cap = kDefaultDenseCap);

/// |<a|b>|
double overlap(const StateVector& a, const StateVector& b);

/// Multinomial draw of `shots` outcomes from |amplitude|^2.
ShotHistogram sample(const StateVector& v, std::uint64_t shots, std::uint64_t seed);

std::vector<double> histogram_to_probs(const ShotHistogram& h);

/// CSV: index,bitstring,count,probability
void write_histogram_csv(std::ostream& out, const ShotHistogram& h, std::span<const std::string> header = {});
ShotHistogram read_histogram_csv(std::istream& in);

/// CSV: index,amplitude (real part; the imaginary part is appended when nonzero)
void write_state_csv(std::ostream& out, const StateVector& v, std::span<const std::string> header = {});

}  // namespace sim
}  // namespace tnload
