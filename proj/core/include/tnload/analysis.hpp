#pragma once

#include <ostream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "tnload/compiler.hpp"
#include "tnload/image_codec.hpp"
#include "tnload/mps.hpp"
#include "tnload/simulator.hpp"

namespace tnload {

enum class SweepVariable { Chi, Depth, Resolution };

struct ScalingRecord {
  SweepVariable variable = SweepVariable::Chi;
  double x = 0.0;  // chi, depth or L depending on variable
  double infidelity = 0.0;
  std::string image_id;
  int L = 0;
  std::string method;
};

/// I = a / x^b, fitted as a straight line in log-log space.
struct PowerLawFit {
  double a = 0.0;
  double b = 0.0;
  double b_stderr = 0.0;
  double x_min = 0.0;
  double x_max = 0.0;
  int n_points = 0;
  std::vector<double> residuals;  // log-space residuals in input order
};

enum class CompileMethod { Iterative, GateByGate, Grow };

std::string_view to_string(CompileMethod m);
CompileMethod parse_method(std::string_view name);

namespace analysis {

/// 1 - |<a|b>|, clamped to [0, 1].
double infidelity(const Vector& a, const Vector& b);
double infidelity(const StateVector& a, const StateVector& b);
double infidelity(const Mps& a, const Mps& b);

PowerLawFit fit_power_law(std::span<const std::pair<double, double>> points);

/// Records sorted by (L, chi).
std::vector<ScalingRecord> chi_scaling_sweep(const ImageGrid& image, std::span<const int> chis,
                                             std::span<const int> sides, std::string image_id = "image",
                                             BitOrdering ordering = BitOrdering::InterleavedStraight);

struct DepthSweepOptions {
  CompileMethod method = CompileMethod::Iterative;
  int sweeps = kDefaultSweeps;
  int target_chi = kDefaultWorkingChi;
  int working_chi = kDefaultWorkingChi;
  BitOrdering ordering = BitOrdering::InterleavedStraight;
  std::string image_id = "image";
};

/// Infidelity of compiled circuits against the exact encoded image, one record
/// per depth. `image` is used at its own resolution. GateByGate starts every
/// depth from the iterative circuit; Grow reads each depth off one run.
std::vector<ScalingRecord> depth_scaling_sweep(const ImageGrid& image, std::span<const int> depths,
                                               const DepthSweepOptions& options = {});

double tv_distance(std::span<const double> p, std::span<const double> q);

/// Fit restricted to points with x_min <= x <= x_max.
PowerLawFit fit_records(std::span<const ScalingRecord> records, double x_min, double x_max);

/// CSV: x,L,infidelity,method,image_id
void write_records_csv(std::ostream& out, std::span<const ScalingRecord> records,
                       std::span<const std::string> header = {});
/// JSON: {a, b, b_stderr, range: [x_min, x_max], n_points}
std::string fit_to_json(const PowerLawFit& fit);

}  // namespace analysis
}  // namespace tnload
