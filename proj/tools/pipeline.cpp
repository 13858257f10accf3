#include "pipeline.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <json.hpp>

#include "tnload/analysis.hpp"
#include "tnload/circuit.hpp"
#include "tnload/compiler.hpp"
#include "tnload/mps.hpp"
#include "tnload/simulator.hpp"

namespace tnload::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string trim(std::string s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

template <class T>
T parse_number(const std::string& key, const std::string& value) {
  T out{};
  const auto* end = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc() || ptr != end) throw ValidationError("config: '" + key + "' has bad value '" + value + "'");
  return out;
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "1" || value == "true" || value == "yes") return true;
  if (value == "0" || value == "false" || value == "no") return false;
  throw ValidationError("config: '" + key + "' expects true/false, got '" + value + "'");
}

std::vector<int> parse_int_list(const std::string& key, const std::string& value) {
  std::vector<int> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_number<int>(key, trim(item)));
  if (out.empty()) throw ValidationError("config: '" + key + "' is an empty list");
  return out;
}

std::string join(const std::vector<int>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
  return s;
}

std::string format_double(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

bool is_power_of_two(int v) { return v > 0 && (v & (v - 1)) == 0; }

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << v;
  return os.str();
}

std::ofstream open_out(const PipelineConfig& cfg, const std::string& name, bool binary = false) {
  fs::create_directories(cfg.out_dir);
  const auto path = fs::path(cfg.out_dir) / name;
  std::ofstream out(path, binary ? std::ios::binary : std::ios::out);
  if (!out) throw FormatError("cannot write '" + path.string() + "'");
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ImageGrid load_at_side(const PipelineConfig& cfg) {
  ImageGrid g = load_image_file(cfg.image);
  if (cfg.side != 0 && cfg.side != g.side_length()) g = downscale(g, cfg.side);
  return g;
}

std::string image_id(const PipelineConfig& cfg) {
  if (!cfg.image_id.empty()) return cfg.image_id;
  return fs::path(cfg.image).stem().string();
}

int side_from_qubits(int n) {
  if (n % 2 != 0) throw ValidationError("circuit has an odd qubit count; it does not encode a square image");
  return 1 << (n / 2);
}

void write_probability_outputs(const PipelineConfig& cfg, const std::vector<double>& probs, int n_qubits,
                               BitOrdering ordering, const std::vector<std::string>& header) {
  const ImageGrid img = decode_probabilities(probs, side_from_qubits(n_qubits), ordering);
  {
    auto out = open_out(cfg, "reconstructed.pgm", true);
    write_pgm(out, img, header);
  }
  {
    auto out = open_out(cfg, "reconstructed.csv");
    for (const auto& line : header) out << "# " << line << "\n";
    write_csv(out, img);
  }
  {
    auto out = open_out(cfg, "curve.csv");
    for (const auto& line : header) out << "# " << line << "\n";
    out << "intensity\n" << std::setprecision(17);
    for (double v : flatten_curve(img, ordering)) out << v << "\n";
  }
}

BitOrdering circuit_ordering(const LayeredCircuit& c) {
  const auto& extra = c.provenance().extra;
  const auto it = extra.find("ordering");
  return it == extra.end() ? BitOrdering::InterleavedStraight : parse_ordering(it->second);
}

std::vector<ScalingRecord> read_records_csv(const std::string& path) {
  std::istringstream in(read_file(path));
  std::vector<ScalingRecord> out;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#' || line.rfind("x,", 0) == 0) continue;
    std::stringstream ss(line);
    std::string x, L, inf, method, id;
    if (!std::getline(ss, x, ',') || !std::getline(ss, L, ',') || !std::getline(ss, inf, ',') ||
        !std::getline(ss, method, ',')) {
      throw FormatError("records csv: malformed row '" + line + "'");
    }
    std::getline(ss, id);
    try {
      out.push_back({SweepVariable::Chi, std::stod(x), std::stod(inf), id, std::stoi(L), method});
    } catch (const std::exception&) {
      throw FormatError("records csv: malformed row '" + line + "'");
    }
  }
  if (out.empty()) throw FormatError("records csv: no rows");
  return out;
}

void write_fit(const PipelineConfig& cfg, const std::string& name, const PowerLawFit& fit,
               const std::vector<std::string>& header, std::ostream& log) {
  auto doc = json::parse(analysis::fit_to_json(fit));
  doc["provenance"] = header;
  auto out = open_out(cfg, name);
  out << doc.dump(1) << "\n";
  log << std::setprecision(6) << "fit: I = " << fit.a << " * x^-" << fit.b << "  (b stderr " << fit.b_stderr
      << ", " << fit.n_points << " points)\n";
}

}  // namespace

Settings parse_config_text(const std::string& text) {
  Settings s;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw FormatError("config line " + std::to_string(lineno) + ": expected key=value");
    s[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return s;
}

Settings load_config_file(const std::string& path) { return parse_config_text(read_file(path)); }

void apply_settings(PipelineConfig& cfg, const Settings& settings) {
  for (const auto& [key, value] : settings) {
    if (key == "image") cfg.image = value;
    else if (key == "side") cfg.side = parse_number<int>(key, value);
    else if (key == "ordering") cfg.ordering = parse_ordering(value);
    else if (key == "chi") cfg.chi = parse_number<int>(key, value);
    else if (key == "depth") cfg.depth = parse_number<int>(key, value);
    else if (key == "sweeps") cfg.sweeps = parse_number<int>(key, value);
    else if (key == "shots") cfg.shots = parse_number<std::uint64_t>(key, value);
    else if (key == "seed") cfg.seed = parse_number<std::uint64_t>(key, value);
    else if (key == "out") cfg.out_dir = value;
    else if (key == "mps") cfg.mps = value;
    else if (key == "circuit") cfg.circuit = value;
    else if (key == "histogram") cfg.histogram = value;
    else if (key == "method") cfg.method = value;
    else if (key == "exact") cfg.exact = parse_bool(key, value);
    else if (key == "panel") cfg.panel = value;
    else if (key == "chis") cfg.chis = parse_int_list(key, value);
    else if (key == "depths") cfg.depths = parse_int_list(key, value);
    else if (key == "sides") cfg.sides = parse_int_list(key, value);
    else if (key == "records") cfg.records = value;
    else if (key == "fit_min") cfg.fit_min = parse_number<double>(key, value);
    else if (key == "fit_max") cfg.fit_max = parse_number<double>(key, value);
    else if (key == "image_id") cfg.image_id = value;
    else throw ValidationError("config: unknown key '" + key + "'");
  }
}

Settings to_settings(const PipelineConfig& cfg) {
  return {{"image", cfg.image},
          {"side", std::to_string(cfg.side)},
          {"ordering", std::string(to_string(cfg.ordering))},
          {"chi", std::to_string(cfg.chi)},
          {"depth", std::to_string(cfg.depth)},
          {"sweeps", std::to_string(cfg.sweeps)},
          {"shots", std::to_string(cfg.shots)},
          {"seed", std::to_string(cfg.seed)},
          {"out", cfg.out_dir},
          {"mps", cfg.mps},
          {"circuit", cfg.circuit},
          {"histogram", cfg.histogram},
          {"method", cfg.method},
          {"exact", cfg.exact ? "true" : "false"},
          {"panel", cfg.panel},
          {"chis", join(cfg.chis)},
          {"depths", join(cfg.depths)},
          {"sides", join(cfg.sides)},
          {"records", cfg.records},
          {"fit_min", format_double(cfg.fit_min)},
          {"fit_max", format_double(cfg.fit_max)},
          {"image_id", cfg.image_id}};
}

std::string config_hash(const PipelineConfig& cfg) {
  std::string canon;
  for (const auto& [k, v] : to_settings(cfg))
    if (k != "out") canon += k + "=" + v + "\n";
  return hex64(fnv1a(canon));
}

std::vector<std::string> provenance_lines(const PipelineConfig& cfg, const std::string& command) {
  return {std::string("tool=tnload ") + TNLOAD_VERSION, "command=" + command, "config_hash=" + config_hash(cfg)};
}

void validate(const PipelineConfig& cfg, const std::string& command) {
  auto require = [](bool ok, const std::string& msg) {
    if (!ok) throw ValidationError(msg);
  };
  require(cfg.side == 0 || (is_power_of_two(cfg.side) && cfg.side >= 2), "side must be 0 or a power of two >= 2");
  require(cfg.chi >= 1, "chi must be >= 1");
  require(cfg.depth >= 1, "depth must be >= 1");
  require(cfg.sweeps >= 0, "sweeps must be >= 0");
  if (command == "encode") {
    require(!cfg.image.empty(), "encode needs an image");
  } else if (command == "compile") {
    require(!cfg.image.empty() || !cfg.mps.empty(), "compile needs an image or an MPS file");
    require(cfg.method == "grow" || cfg.method == "iterative", "compile method must be grow or iterative");
    require(cfg.chi >= 2, "compile needs chi >= 2");
  } else if (command == "simulate") {
    require(!cfg.circuit.empty(), "simulate needs a circuit file");
    require(cfg.exact || cfg.shots >= 1, "shots must be >= 1 (use --exact for exact probabilities)");
  } else if (command == "reconstruct") {
    require(!cfg.histogram.empty(), "reconstruct needs a histogram file");
  } else if (command == "analyze") {
    if (cfg.panel == "fit") {
      require(!cfg.records.empty(), "analyze fit needs a records file");
    } else {
      require(cfg.panel == "chi" || cfg.panel == "depth" || cfg.panel == "resolution",
              "panel must be chi, depth, resolution or fit");
      require(!cfg.image.empty(), "analyze needs an image");
      if (cfg.panel == "depth") parse_method(cfg.method);
      for (int c : cfg.chis) require(c >= 1, "chis must be >= 1");
      for (int d : cfg.depths) require(d >= 1, "depths must be >= 1");
      for (int s : cfg.sides) require(is_power_of_two(s) && s >= 2, "sides must be powers of two >= 2");
    }
  }
}

void cmd_encode(const PipelineConfig& cfg, std::ostream& log) {
  validate(cfg, "encode");
  const auto header = provenance_lines(cfg, "encode");
  const ImageGrid g = load_at_side(cfg);
  const AmplitudeState s = encode_amplitudes(g, cfg.ordering);
  const auto compressed = mps::from_dense(s, cfg.chi, 0.0);

  {
    auto out = open_out(cfg, "amplitudes.csv");
    for (const auto& line : header) out << "# " << line << "\n";
    out << "# ordering=" << to_string(s.ordering) << "\n";
    out << "index,amplitude\n" << std::setprecision(17);
    for (std::size_t i = 0; i < s.amplitudes.size(); ++i) out << i << ',' << s.amplitudes[i] << "\n";
  }
  {
    auto doc = json::parse(mps::to_json(compressed.mps, cfg.ordering));
    doc["provenance"] = header;
    auto out = open_out(cfg, "mps.json");
    out << doc.dump(1) << "\n";
  }
  {
    json doc{{"discarded", compressed.report.discarded},
             {"total", compressed.report.total()},
             {"bond_dims", compressed.mps.bond_dims()},
             {"provenance", header}};
    auto out = open_out(cfg, "truncation.json");
    out << doc.dump(1) << "\n";
  }
  log << "encoded " << g.side_length() << "x" << g.side_length() << " image into " << s.n_qubits
      << " qubits; largest bond " << compressed.mps.largest_bond() << ", discarded weight " << std::setprecision(6)
      << compressed.report.total() << "\n";
}

void cmd_compile(const PipelineConfig& cfg, std::ostream& log) {
  validate(cfg, "compile");
  const auto header = provenance_lines(cfg, "compile");
  Mps target;
  BitOrdering ordering = cfg.ordering;
  std::string target_text;
  if (!cfg.mps.empty()) {
    target_text = read_file(cfg.mps);
    auto file = mps::from_json(target_text);
    target = mps::left_canonicalize(file.mps);
    ordering = file.ordering;
  } else {
    const AmplitudeState s = encode_amplitudes(load_at_side(cfg), cfg.ordering);
    target = mps::from_dense(s, cfg.chi, 0.0).mps;
    target_text = mps::to_json(target, ordering);
  }

  SweepOptions so;
  so.n_sweeps = cfg.sweeps;
  CompileResult r = cfg.method == "iterative" ? compiler::iterative_construct(target, cfg.depth, cfg.chi)
                                              : compiler::grow_and_optimize(target, cfg.depth, so, cfg.chi);
  auto& prov = r.circuit.mutable_provenance();
  prov.target_hash = hex64(fnv1a(target_text));
  prov.chi = cfg.chi;
  prov.extra["method"] = cfg.method;
  prov.extra["ordering"] = std::string(to_string(ordering));
  prov.extra["tool"] = header[0].substr(5);
  prov.extra["config_hash"] = config_hash(cfg);

  {
    auto out = open_out(cfg, "circuit.json");
    out << circuit::serialize(r.circuit, {true});
  }
  {
    auto out = open_out(cfg, "trace.csv");
    compiler::write_trace_csv(out, r.trace, header);
  }
  log << "compiled depth " << r.circuit.depth() << " on " << r.circuit.n_qubits() << " qubits ("
      << circuit::cnot_count(r.circuit) << " CNOT-equivalents); final infidelity " << std::setprecision(6)
      << 1.0 - r.trace.final_overlap() << "\n";
}

void cmd_simulate(const PipelineConfig& cfg, std::ostream& log) {
  validate(cfg, "simulate");
  const auto header = provenance_lines(cfg, "simulate");
  const LayeredCircuit c = circuit::deserialize(read_file(cfg.circuit));
  const BitOrdering ordering = circuit_ordering(c);
  const StateVector state = sim::run(c);

  std::vector<double> probs;
  if (cfg.exact) {
    probs = state.probabilities();
    auto out = open_out(cfg, "state.csv");
    sim::write_state_csv(out, state, header);
  } else {
    const ShotHistogram h = sim::sample(state, cfg.shots, cfg.seed);
    auto out = open_out(cfg, "histogram.csv");
    sim::write_histogram_csv(out, h, header);
    probs = sim::histogram_to_probs(h);
  }
  write_probability_outputs(cfg, probs, c.n_qubits(), ordering, header);
  log << "simulated " << c.n_qubits() << " qubits, "
      << (cfg.exact ? std::string("exact probabilities") : std::to_string(cfg.shots) + " shots") << "\n";
}

void cmd_reconstruct(const PipelineConfig& cfg, std::ostream& log) {
  validate(cfg, "reconstruct");
  const auto header = provenance_lines(cfg, "reconstruct");
  std::istringstream in(read_file(cfg.histogram));
  const ShotHistogram h = sim::read_histogram_csv(in);
  write_probability_outputs(cfg, sim::histogram_to_probs(h), h.n_qubits, cfg.ordering, header);
  log << "reconstructed from " << h.shots << " shots\n";
}

void cmd_analyze(const PipelineConfig& cfg, std::ostream& log) {
  validate(cfg, "analyze");
  const auto header = provenance_lines(cfg, "analyze");
  if (cfg.panel == "fit") {
    const auto recs = read_records_csv(cfg.records);
    write_fit(cfg, "fit.json", analysis::fit_records(recs, cfg.fit_min, cfg.fit_max), header, log);
    return;
  }

  const ImageGrid img = load_image_file(cfg.image);
  const std::string id = image_id(cfg);
  if (cfg.panel == "chi" || cfg.panel == "resolution") {
    const std::vector<int> chis = cfg.panel == "chi" ? cfg.chis : std::vector<int>{cfg.chi};
    const auto recs = analysis::chi_scaling_sweep(img, chis, cfg.sides, id, cfg.ordering);
    {
      auto out = open_out(cfg, cfg.panel + "_sweep.csv");
      analysis::write_records_csv(out, recs, header);
    }
    if (cfg.panel == "chi") {
      // Fit on the largest resolution over chi <= L/4, excluding exact points.
      const int L = *std::max_element(cfg.sides.begin(), cfg.sides.end());
      std::vector<ScalingRecord> at_L;
      for (const auto& r : recs)
        if (r.L == L && r.x <= L / 4.0 && r.infidelity > 0.0) at_L.push_back(r);
      write_fit(cfg, "chi_fit.json", analysis::fit_records(at_L, cfg.fit_min, cfg.fit_max), header, log);
    } else {
      for (const auto& r : recs) log << "L=" << r.L << " chi=" << r.x << " I=" << r.infidelity << "\n";
    }
    return;
  }

  const ImageGrid g = cfg.side != 0 && cfg.side != img.side_length() ? downscale(img, cfg.side) : img;
  analysis::DepthSweepOptions o;
  o.method = parse_method(cfg.method);
  o.sweeps = cfg.sweeps;
  o.target_chi = cfg.chi;
  o.working_chi = cfg.chi;
  o.ordering = cfg.ordering;
  o.image_id = id;
  const auto recs = analysis::depth_scaling_sweep(g, cfg.depths, o);
  {
    auto out = open_out(cfg, "depth_sweep.csv");
    analysis::write_records_csv(out, recs, header);
  }
  write_fit(cfg, "depth_fit.json", analysis::fit_records(recs, cfg.fit_min, cfg.fit_max), header, log);
}

bool cmd_selftest(std::ostream& log) {
  bool ok = true;
  for (double b : {1.645, 0.603}) {
    std::vector<std::pair<double, double>> pts;
    for (double x = 1; x <= 64; x *= 2) pts.emplace_back(x, 0.8 * std::pow(x, -b));
    const auto fit = analysis::fit_power_law(pts);
    const bool pass = std::abs(fit.b - b) <= 1e-9 && std::abs(fit.a - 0.8) <= 1e-9;
    log << (pass ? "ok   " : "FAIL ") << "power-law recovery b=" << b << " -> " << std::setprecision(12) << fit.b
        << "\n";
    ok = ok && pass;
  }
  const bool counts = circuit::cnot_count(8, 3) == 42 && circuit::cnot_count(10, 10) == 180;
  log << (counts ? "ok   " : "FAIL ") << "cnot accounting\n";
  return ok && counts;
}

int guarded(const std::function<int()>& body, std::ostream& err) {
  try {
    return body();
  } catch (const FormatError& e) {
    err << "format error: " << e.what() << "\n";
    return kExitFormat;
  } catch (const ValidationError& e) {
    err << "validation error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const NumericError& e) {
    err << "numeric error: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const fs::filesystem_error& e) {
    err << "format error: " << e.what() << "\n";
    return kExitFormat;
  }
}

}  // namespace tnload::cli
