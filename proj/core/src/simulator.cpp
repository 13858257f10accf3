#include "tnload/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <random>
#include <sstream>

namespace tnload {

namespace {

void check_qubits(int n_qubits, int dense_cap) {
  if (n_qubits < 1) throw ValidationError("StateVector: need at least one qubit");
  if (n_qubits > dense_cap) {
    throw ValidationError("StateVector: " + std::to_string(n_qubits) + " qubits exceeds dense cap " +
                          std::to_string(dense_cap));
  }
}

std::string bitstring(std::uint64_t index, int n) {
  std::string s(static_cast<std::size_t>(n), '0');
  for (int q = 0; q < n; ++q)
    if ((index >> (n - 1 - q)) & 1u) s[static_cast<std::size_t>(q)] = '1';
  return s;
}

}  // namespace

StateVector::StateVector(int n_qubits, int dense_cap) : n_qubits_(n_qubits) {
  check_qubits(n_qubits, dense_cap);
  amps_ = Vector::Zero(Eigen::Index{1} << n_qubits);
  amps_(0) = 1.0;
}

StateVector::StateVector(int n_qubits, Vector amplitudes) : n_qubits_(n_qubits), amps_(std::move(amplitudes)) {
  check_qubits(n_qubits, 62);
  if (amps_.size() != (Eigen::Index{1} << n_qubits)) throw ValidationError("StateVector: amplitude count is not 2^N");
}

std::vector<double> StateVector::probabilities() const {
  std::vector<double> p(static_cast<std::size_t>(amps_.size()));
  for (Eigen::Index i = 0; i < amps_.size(); ++i) p[static_cast<std::size_t>(i)] = std::norm(amps_(i));
  return p;
}

void StateVector::apply(const Matrix4& u, int site) {
  if (site < 0 || site + 1 >= n_qubits_) throw ValidationError("StateVector::apply: gate site out of range");
  const int low = n_qubits_ - 2 - site;  // bit position of qubit site + 1
  const std::uint64_t low_mask = (std::uint64_t{1} << low) - 1;
  const std::uint64_t b_low = std::uint64_t{1} << low;
  const std::uint64_t b_high = b_low << 1;
  const std::uint64_t blocks = std::uint64_t{1} << (n_qubits_ - 2);
  cplx* a = amps_.data();
  for (std::uint64_t i = 0; i < blocks; ++i) {
    const std::uint64_t base = ((i & ~low_mask) << 2) | (i & low_mask);
    const cplx v0 = a[base];
    const cplx v1 = a[base | b_low];
    const cplx v2 = a[base | b_high];
    const cplx v3 = a[base | b_high | b_low];
    a[base] = u(0, 0) * v0 + u(0, 1) * v1 + u(0, 2) * v2 + u(0, 3) * v3;
    a[base | b_low] = u(1, 0) * v0 + u(1, 1) * v1 + u(1, 2) * v2 + u(1, 3) * v3;
    a[base | b_high] = u(2, 0) * v0 + u(2, 1) * v1 + u(2, 2) * v2 + u(2, 3) * v3;
    a[base | b_high | b_low] = u(3, 0) * v0 + u(3, 1) * v1 + u(3, 2) * v2 + u(3, 3) * v3;
  }
}

void StateVector::apply(const TwoQubitGate& g) { apply(g.matrix, g.site); }

void StateVector::apply(const CircuitLayer& layer) {
  for (const auto& g : layer.gates()) apply(g);
}

void StateVector::apply(const LayeredCircuit& c) {
  if (c.n_qubits() != n_qubits_) throw ValidationError("StateVector::apply: circuit qubit count mismatch");
  for (const auto& l : c.layers()) apply(l);
}

namespace sim {

StateVector run(const LayeredCircuit& c, int dense_cap) {
  StateVector v(c.n_qubits(), dense_cap);
  v.apply(c);
  return v;
}

double overlap(const StateVector& a, const StateVector& b) {
  if (a.n_qubits() != b.n_qubits()) throw ValidationError("overlap: qubit count mismatch");
  return std::abs(a.amplitudes().dot(b.amplitudes()));
}

ShotHistogram sample(const StateVector& v, std::uint64_t shots, std::uint64_t seed) {
  const auto probs = v.probabilities();
  std::vector<double> cdf(probs.size());
  double acc = 0.0;
  std::size_t last_nonzero = 0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    acc += probs[i];
    cdf[i] = acc;
    if (probs[i] > 0.0) last_nonzero = i;
  }
  if (!(acc > 0.0)) throw NumericError("sample: state has zero norm");

  ShotHistogram h;
  h.n_qubits = v.n_qubits();
  h.counts.assign(probs.size(), 0);
  h.shots = shots;
  h.seed = seed;
  std::mt19937_64 rng(seed);
  for (std::uint64_t s = 0; s < shots; ++s) {
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53 * acc;
    auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    auto idx = static_cast<std::size_t>(it - cdf.begin());
    idx = std::min(idx, last_nonzero);
    ++h.counts[idx];
  }
  return h;
}

std::vector<double> histogram_to_probs(const ShotHistogram& h) {
  if (h.shots == 0) throw ValidationError("histogram_to_probs: histogram has zero shots");
  std::vector<double> p(h.counts.size());
  for (std::size_t i = 0; i < p.size(); ++i) p[i] = static_cast<double>(h.counts[i]) / static_cast<double>(h.shots);
  return p;
}

void write_histogram_csv(std::ostream& out, const ShotHistogram& h, std::span<const std::string> header) {
  for (const auto& line : header) out << "# " << line << "\n";
  out << "# sampler=" << kSamplerAlgorithm << " seed=" << h.seed << " shots=" << h.shots << "\n";
  out << "index,bitstring,count,probability\n";
  out << std::setprecision(17);
  for (std::size_t i = 0; i < h.counts.size(); ++i) {
    const double p = h.shots ? static_cast<double>(h.counts[i]) / static_cast<double>(h.shots) : 0.0;
    out << i << ',' << bitstring(i, h.n_qubits) << ',' << h.counts[i] << ',' << p << "\n";
  }
}

ShotHistogram read_histogram_csv(std::istream& in) {
  ShotHistogram h;
  std::string line;
  std::vector<std::pair<std::uint64_t, std::uint64_t>> rows;
  int width = -1;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto pos = line.find("seed=");
      if (pos != std::string::npos) h.seed = std::stoull(line.substr(pos + 5));
      continue;
    }
    if (line.rfind("index", 0) == 0) continue;
    std::stringstream ss(line);
    std::string idx, bits, count;
    if (!std::getline(ss, idx, ',') || !std::getline(ss, bits, ',') || !std::getline(ss, count, ',')) {
      throw FormatError("histogram csv: malformed row '" + line + "'");
    }
    try {
      rows.emplace_back(std::stoull(idx), std::stoull(count));
    } catch (const std::exception&) {
      throw FormatError("histogram csv: malformed row '" + line + "'");
    }
    if (width < 0) width = static_cast<int>(bits.size());
    if (static_cast<int>(bits.size()) != width) throw FormatError("histogram csv: inconsistent bitstring width");
  }
  if (rows.empty() || width < 1 || width > 30) throw FormatError("histogram csv: no rows");
  h.n_qubits = width;
  h.counts.assign(std::size_t{1} << width, 0);
  for (const auto& [i, c] : rows) {
    if (i >= h.counts.size()) throw FormatError("histogram csv: index out of range");
    h.counts[i] += c;
    h.shots += c;
  }
  return h;
}

void write_state_csv(std::ostream& out, const StateVector& v, std::span<const std::string> header) {
  for (const auto& line : header) out << "# " << line << "\n";
  const bool real = v.amplitudes().imag().isZero(0.0);
  out << (real ? "index,amplitude\n" : "index,amplitude,imag\n");
  out << std::setprecision(17);
  for (Eigen::Index i = 0; i < v.amplitudes().size(); ++i) {
    out << i << ',' << v.amplitudes()(i).real();
    if (!real) out << ',' << v.amplitudes()(i).imag();
    out << "\n";
  }
}

}  // namespace sim
}  // namespace tnload
