#include "tnload/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <map>

#include <json.hpp>

namespace tnload {

std::string_view to_string(CompileMethod m) {
  switch (m) {
    case CompileMethod::Iterative: return "iterative";
    case CompileMethod::GateByGate: return "gate_by_gate";
    case CompileMethod::Grow: return "grow";
  }
  return "unknown";
}

CompileMethod parse_method(std::string_view name) {
  if (name == "iterative") return CompileMethod::Iterative;
  if (name == "gate_by_gate" || name == "gate-by-gate") return CompileMethod::GateByGate;
  if (name == "grow") return CompileMethod::Grow;
  throw ValidationError("unknown compile method '" + std::string(name) + "'");
}

namespace analysis {

namespace {

bool is_power_of_two(int v) { return v > 0 && (v & (v - 1)) == 0; }

double clamp_unit(double v) { return std::clamp(v, 0.0, 1.0); }

}  // namespace

double infidelity(const Vector& a, const Vector& b) {
  if (a.size() != b.size()) throw ValidationError("infidelity: dimension mismatch");
  return clamp_unit(1.0 - std::abs(a.dot(b)));
}

double infidelity(const StateVector& a, const StateVector& b) { return clamp_unit(1.0 - sim::overlap(a, b)); }

double infidelity(const Mps& a, const Mps& b) { return clamp_unit(1.0 - std::abs(mps::inner(a, b))); }

PowerLawFit fit_power_law(std::span<const std::pair<double, double>> points) {
  if (points.size() < 3) throw ValidationError("fit_power_law: need at least 3 points");
  const auto n = static_cast<double>(points.size());
  double mx = 0.0, my = 0.0;
  PowerLawFit fit;
  fit.x_min = points.front().first;
  fit.x_max = points.front().first;
  for (const auto& [x, y] : points) {
    if (!(x > 0.0) || !(y > 0.0)) throw ValidationError("fit_power_law: x and I must be positive");
    mx += std::log(x);
    my += std::log(y);
    fit.x_min = std::min(fit.x_min, x);
    fit.x_max = std::max(fit.x_max, x);
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (const auto& [x, y] : points) {
    const double dx = std::log(x) - mx;
    sxx += dx * dx;
    sxy += dx * (std::log(y) - my);
  }
  if (!(sxx > 0.0)) throw ValidationError("fit_power_law: all x values coincide");
  const double slope = sxy / sxx;
  const double intercept = my - slope * mx;
  double ssr = 0.0;
  for (const auto& [x, y] : points) {
    const double r = std::log(y) - (intercept + slope * std::log(x));
    fit.residuals.push_back(r);
    ssr += r * r;
  }
  fit.b = -slope;
  fit.a = std::exp(intercept);
  fit.b_stderr = std::sqrt(ssr / (n - 2.0) / sxx);
  fit.n_points = static_cast<int>(points.size());
  return fit;
}

std::vector<ScalingRecord> chi_scaling_sweep(const ImageGrid& image, std::span<const int> chis,
                                             std::span<const int> sides, std::string image_id, BitOrdering ordering) {
  std::vector<int> ls(sides.begin(), sides.end());
  std::vector<int> cs(chis.begin(), chis.end());
  std::sort(ls.begin(), ls.end());
  std::sort(cs.begin(), cs.end());
  for (int L : ls) {
    if (!is_power_of_two(L) || L < 2 || L > image.side_length()) {
      throw ValidationError("chi_scaling_sweep: resolution " + std::to_string(L) +
                            " must be a power of two in [2, " + std::to_string(image.side_length()) + "]");
    }
  }
  for (int c : cs)
    if (c < 1) throw ValidationError("chi_scaling_sweep: chi must be >= 1");

  std::vector<ScalingRecord> out;
  for (int L : ls) {
    const ImageGrid g = L == image.side_length() ? image : downscale(image, L);
    const Vector exact = encode_amplitudes(g, ordering).as_complex();
    for (int chi : cs) {
      const auto compressed = mps::from_dense(exact, chi, 0.0);
      const double inf = infidelity(exact, mps::to_dense(compressed.mps));
      out.push_back({SweepVariable::Chi, static_cast<double>(chi), inf, image_id, L, "mps"});
    }
  }
  return out;
}

std::vector<ScalingRecord> depth_scaling_sweep(const ImageGrid& image, std::span<const int> depths,
                                               const DepthSweepOptions& options) {
  std::vector<int> ds(depths.begin(), depths.end());
  std::sort(ds.begin(), ds.end());
  ds.erase(std::unique(ds.begin(), ds.end()), ds.end());
  if (ds.empty()) throw ValidationError("depth_scaling_sweep: no depths given");
  if (ds.front() < 1) throw ValidationError("depth_scaling_sweep: depths must be >= 1");

  const int L = image.side_length();
  const AmplitudeState encoded = encode_amplitudes(image, options.ordering);
  const StateVector exact(encoded.n_qubits, encoded.as_complex());
  const Mps target = mps::from_dense(encoded, options.target_chi, 0.0).mps;
  const std::string method(to_string(options.method));

  std::vector<ScalingRecord> out;
  auto record = [&](int d, const LayeredCircuit& c) {
    out.push_back({SweepVariable::Depth, static_cast<double>(d), infidelity(exact, sim::run(c)), options.image_id, L,
                   method});
  };

  switch (options.method) {
    case CompileMethod::Iterative: {
      // Depth-d iterative circuit = the d innermost layers of the deepest one.
      const auto full = compiler::iterative_construct(target, ds.back(), options.working_chi).circuit;
      for (int d : ds) {
        std::vector<CircuitLayer> layers(full.layers().end() - d, full.layers().end());
        record(d, LayeredCircuit(full.n_qubits(), std::move(layers)));
      }
      break;
    }
    case CompileMethod::GateByGate: {
      SweepOptions so;
      so.n_sweeps = options.sweeps;
      for (int d : ds) {
        const auto start = compiler::iterative_construct(target, d, options.working_chi).circuit;
        record(d, compiler::sweep_optimize(start, target, so).circuit);
      }
      break;
    }
    case CompileMethod::Grow: {
      SweepOptions so;
      so.n_sweeps = options.sweeps;
      compiler::grow_and_optimize(target, ds.back(), so, options.working_chi, [&](int d, const LayeredCircuit& c) {
        if (std::binary_search(ds.begin(), ds.end(), d)) record(d, c);
      });
      break;
    }
  }
  return out;
}

double tv_distance(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) throw ValidationError("tv_distance: length mismatch");
  double sp = 0.0, sq = 0.0, l1 = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    sp += p[i];
    sq += q[i];
    l1 += std::abs(p[i] - q[i]);
  }
  if (std::abs(sp - 1.0) > 1e-6 || std::abs(sq - 1.0) > 1e-6) {
    throw ValidationError("tv_distance: inputs must each sum to 1");
  }
  return std::clamp(0.5 * l1, 0.0, 1.0);
}

PowerLawFit fit_records(std::span<const ScalingRecord> records, double x_min, double x_max) {
  std::vector<std::pair<double, double>> pts;
  for (const auto& r : records)
    if (r.x >= x_min && r.x <= x_max) pts.emplace_back(r.x, r.infidelity);
  return fit_power_law(pts);
}

void write_records_csv(std::ostream& out, std::span<const ScalingRecord> records, std::span<const std::string> header) {
  std::vector<ScalingRecord> sorted(records.begin(), records.end());
  std::stable_sort(sorted.begin(), sorted.end(), [](const ScalingRecord& a, const ScalingRecord& b) {
    return a.L != b.L ? a.L < b.L : a.x < b.x;
  });
  for (const auto& line : header) out << "# " << line << "\n";
  out << "x,L,infidelity,method,image_id\n";
  out << std::setprecision(17);
  for (const auto& r : sorted) out << r.x << ',' << r.L << ',' << r.infidelity << ',' << r.method << ',' << r.image_id << "\n";
}

std::string fit_to_json(const PowerLawFit& fit) {
  nlohmann::json j{{"a", fit.a},
                   {"b", fit.b},
                   {"b_stderr", fit.b_stderr},
                   {"range", {fit.x_min, fit.x_max}},
                   {"n_points", fit.n_points}};
  return j.dump(1) + "\n";
}

}  // namespace analysis
}  // namespace tnload
