#include "tnload/image_codec.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace tnload {

namespace {

bool is_power_of_two(long long v) { return v > 0 && (v & (v - 1)) == 0; }

int log2_exact(int v) { return std::countr_zero(static_cast<unsigned>(v)); }

void require_valid_side(long long rows, long long cols) {
  if (rows != cols) {
    throw ValidationError("image is " + std::to_string(rows) + "x" + std::to_string(cols) +
                          "; only square images are accepted (crop or pad before loading)");
  }
  if (rows < 2 || !is_power_of_two(rows)) {
    throw ValidationError("image side " + std::to_string(rows) +
                          " is not a power of two >= 2; pre-pad the image or downscale a valid one");
  }
}

// Reads the next whitespace-delimited header token, skipping '#' comments.
std::string next_pgm_token(std::istream& in) {
  std::string tok;
  int c;
  while ((c = in.peek()) != EOF) {
    if (std::isspace(c)) {
      in.get();
    } else if (c == '#') {
      std::string discard;
      std::getline(in, discard);
    } else {
      break;
    }
  }
  while ((c = in.peek()) != EOF && !std::isspace(c) && c != '#') tok.push_back(static_cast<char>(in.get()));
  if (tok.empty()) throw FormatError("pgm: truncated header");
  return tok;
}

long long parse_header_int(std::istream& in, const char* what) {
  const std::string tok = next_pgm_token(in);
  long long v = 0;
  try {
    std::size_t used = 0;
    v = std::stoll(tok, &used);
    if (used != tok.size()) throw std::invalid_argument(tok);
  } catch (const std::exception&) {
    throw FormatError(std::string("pgm: bad ") + what + " '" + tok + "'");
  }
  if (v <= 0) throw FormatError(std::string("pgm: nonpositive ") + what);
  return v;
}

ImageGrid load_pgm(std::istream& in) {
  char magic[2] = {0, 0};
  in.read(magic, 2);
  if (!in || magic[0] != 'P' || (magic[1] != '2' && magic[1] != '5')) {
    throw FormatError("pgm: expected magic P2 or P5");
  }
  const bool binary = magic[1] == '5';
  const long long width = parse_header_int(in, "width");
  const long long height = parse_header_int(in, "height");
  const long long maxval = parse_header_int(in, "maxval");
  if (maxval > 255) throw FormatError("pgm: only 8-bit images (maxval <= 255) are supported");
  require_valid_side(height, width);

  const auto count = static_cast<std::size_t>(width * height);
  std::vector<double> pixels(count);
  if (binary) {
    if (!std::isspace(in.get())) throw FormatError("pgm: missing whitespace after maxval");
    std::vector<unsigned char> raw(count);
    in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(count));
    if (static_cast<std::size_t>(in.gcount()) != count) throw FormatError("pgm: truncated raster");
    for (std::size_t i = 0; i < count; ++i) {
      if (raw[i] > maxval) throw FormatError("pgm: sample exceeds maxval");
      pixels[i] = static_cast<double>(raw[i]) / static_cast<double>(maxval);
    }
  } else {
    for (std::size_t i = 0; i < count; ++i) {
      long long v = -1;
      if (!(in >> v)) throw FormatError("pgm: truncated or non-numeric raster");
      if (v < 0 || v > maxval) throw FormatError("pgm: sample out of range");
      pixels[i] = static_cast<double>(v) / static_cast<double>(maxval);
    }
  }
  return ImageGrid(static_cast<int>(width), std::move(pixels));
}

ImageGrid load_csv(std::istream& in) {
  std::vector<double> pixels;
  long long rows = 0;
  long long cols = -1;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    long long this_cols = 0;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        std::size_t used = 0;
        const double v = std::stod(cell, &used);
        if (cell.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(cell);
        pixels.push_back(v);
      } catch (const std::exception&) {
        throw FormatError("csv: cannot parse '" + cell + "' on row " + std::to_string(rows + 1));
      }
      ++this_cols;
    }
    if (cols < 0) cols = this_cols;
    if (this_cols != cols) throw FormatError("csv: ragged row " + std::to_string(rows + 1));
    ++rows;
  }
  if (rows == 0) throw FormatError("csv: no data rows");
  require_valid_side(rows, cols);
  return ImageGrid(static_cast<int>(rows), std::move(pixels));
}

}  // namespace

ImageGrid::ImageGrid(int side_length, std::vector<double> pixels)
    : side_(side_length), bits_(0), pixels_(std::move(pixels)) {
  if (side_ < 1 || !is_power_of_two(side_)) {
    throw ValidationError("ImageGrid: side length " + std::to_string(side_) + " is not a power of two");
  }
  bits_ = log2_exact(side_);
  if (pixels_.size() != static_cast<std::size_t>(side_) * side_) {
    throw ValidationError("ImageGrid: expected " + std::to_string(side_ * side_) + " pixels, got " +
                          std::to_string(pixels_.size()));
  }
  for (double p : pixels_) {
    if (!(p >= 0.0 && p <= 1.0)) throw ValidationError("ImageGrid: intensity outside [0,1]");
  }
}

ImageGrid ImageGrid::filled(int side_length, double value) {
  return ImageGrid(side_length,
                   std::vector<double>(static_cast<std::size_t>(side_length) * side_length, value));
}

double ImageGrid::total_intensity() const {
  double s = 0.0;
  for (double p : pixels_) s += p;
  return s;
}

std::string_view to_string(BitOrdering ordering) {
  switch (ordering) {
    case BitOrdering::InterleavedStraight: return "interleaved-straight";
    case BitOrdering::InterleavedSnake: return "interleaved-snake";
  }
  return "unknown";
}

BitOrdering parse_ordering(std::string_view name) {
  if (name == "interleaved-straight" || name == "straight") return BitOrdering::InterleavedStraight;
  if (name == "interleaved-snake" || name == "snake") return BitOrdering::InterleavedSnake;
  throw ValidationError("unknown bit ordering '" + std::string(name) + "'");
}

Vector AmplitudeState::as_complex() const {
  Vector v(static_cast<Eigen::Index>(amplitudes.size()));
  for (std::size_t i = 0; i < amplitudes.size(); ++i) v(static_cast<Eigen::Index>(i)) = amplitudes[i];
  return v;
}

ImageGrid load_image(std::istream& source, ImageFormat format) {
  return format == ImageFormat::Pgm ? load_pgm(source) : load_csv(source);
}

ImageGrid load_image_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open image '" + path + "'");
  const bool is_csv = path.size() >= 4 && path.compare(path.size() - 4, 4, ".csv") == 0;
  return load_image(in, is_csv ? ImageFormat::Csv : ImageFormat::Pgm);
}

ImageGrid downscale(const ImageGrid& g, int target_L) {
  const int L = g.side_length();
  if (target_L < 1 || !is_power_of_two(target_L)) {
    throw ValidationError("downscale: target side " + std::to_string(target_L) + " is not a power of two");
  }
  if (target_L > L) throw ValidationError("downscale: target side exceeds source side");
  if (L % target_L != 0) throw ValidationError("downscale: target side does not divide source side");
  const int block = L / target_L;
  const double inv_area = 1.0 / (static_cast<double>(block) * block);
  std::vector<double> out(static_cast<std::size_t>(target_L) * target_L, 0.0);
  for (int x = 0; x < target_L; ++x) {
    for (int y = 0; y < target_L; ++y) {
      double s = 0.0;
      for (int dx = 0; dx < block; ++dx)
        for (int dy = 0; dy < block; ++dy) s += g.at(x * block + dx, y * block + dy);
      // Clamp guards the [0,1] invariant against rounding in the mean.
      out[static_cast<std::size_t>(x) * target_L + y] = std::clamp(s * inv_area, 0.0, 1.0);
    }
  }
  return ImageGrid(target_L, std::move(out));
}

std::uint64_t pixel_to_basis_index(int x, int y, int L, BitOrdering ordering) {
  if (L < 1 || !is_power_of_two(L)) throw ValidationError("pixel_to_basis_index: L must be a power of two");
  if (x < 0 || y < 0 || x >= L || y >= L) {
    throw ValidationError("pixel_to_basis_index: coordinate (" + std::to_string(x) + "," +
                          std::to_string(y) + ") outside [0," + std::to_string(L) + ")");
  }
  const int n = log2_exact(L);
  std::uint64_t index = 0;
  for (int rung = 0; rung < n; ++rung) {
    const std::uint64_t xb = (static_cast<unsigned>(x) >> (n - 1 - rung)) & 1u;
    const std::uint64_t yb = (static_cast<unsigned>(y) >> (n - 1 - rung)) & 1u;
    const bool swap = ordering == BitOrdering::InterleavedSnake && (rung % 2 == 1);
    index = (index << 2) | (swap ? (yb << 1 | xb) : (xb << 1 | yb));
  }
  return index;
}

std::pair<int, int> basis_index_to_pixel(std::uint64_t index, int L, BitOrdering ordering) {
  if (L < 1 || !is_power_of_two(L)) throw ValidationError("basis_index_to_pixel: L must be a power of two");
  const int n = log2_exact(L);
  if (index >= static_cast<std::uint64_t>(L) * static_cast<std::uint64_t>(L)) {
    throw ValidationError("basis_index_to_pixel: index out of range");
  }
  int x = 0;
  int y = 0;
  for (int rung = 0; rung < n; ++rung) {
    const unsigned pair = static_cast<unsigned>(index >> (2 * (n - 1 - rung))) & 3u;
    const bool swap = ordering == BitOrdering::InterleavedSnake && (rung % 2 == 1);
    const int hi = static_cast<int>(pair >> 1);
    const int lo = static_cast<int>(pair & 1u);
    x = (x << 1) | (swap ? lo : hi);
    y = (y << 1) | (swap ? hi : lo);
  }
  return {x, y};
}

AmplitudeState encode_amplitudes(const ImageGrid& g, BitOrdering ordering) {
  const int L = g.side_length();
  if (L < 2) throw ValidationError("encode_amplitudes: need at least a 2x2 image");
  const double norm = g.total_intensity();
  if (!(norm > 0.0)) throw ValidationError("encode_amplitudes: image has zero total intensity");
  AmplitudeState s;
  s.n_qubits = 2 * g.bits_per_axis();
  s.ordering = ordering;
  s.amplitudes.assign(static_cast<std::size_t>(L) * L, 0.0);
  for (int x = 0; x < L; ++x)
    for (int y = 0; y < L; ++y)
      s.amplitudes[pixel_to_basis_index(x, y, L, ordering)] = std::sqrt(g.at(x, y) / norm);
  return s;
}

ImageGrid decode_probabilities(std::span<const double> probs, int L, BitOrdering ordering) {
  if (L < 1 || !is_power_of_two(L)) throw ValidationError("decode_probabilities: L must be a power of two");
  const std::size_t n = static_cast<std::size_t>(L) * L;
  if (probs.size() != n) {
    throw ValidationError("decode_probabilities: expected " + std::to_string(n) + " probabilities, got " +
                          std::to_string(probs.size()));
  }
  double total = 0.0;
  for (double p : probs) {
    if (!std::isfinite(p)) throw NumericError("decode_probabilities: non-finite probability");
    if (p < -1e-12) throw ValidationError("decode_probabilities: negative probability");
    total += std::max(p, 0.0);
  }
  if (std::abs(total - 1.0) > 1e-6) throw ValidationError("decode_probabilities: probabilities do not sum to 1");

  std::vector<double> pixels(n, 0.0);
  double peak = 0.0;
  for (int x = 0; x < L; ++x) {
    for (int y = 0; y < L; ++y) {
      const double p = std::max(probs[pixel_to_basis_index(x, y, L, ordering)], 0.0) / total;
      pixels[static_cast<std::size_t>(x) * L + y] = p;
      peak = std::max(peak, p);
    }
  }
  for (double& p : pixels) p /= peak;
  return ImageGrid(L, std::move(pixels));
}

std::vector<double> flatten_curve(const ImageGrid& g, BitOrdering ordering) {
  const int L = g.side_length();
  std::vector<double> curve(static_cast<std::size_t>(L) * L);
  for (int x = 0; x < L; ++x)
    for (int y = 0; y < L; ++y) curve[pixel_to_basis_index(x, y, L, ordering)] = g.at(x, y);
  return curve;
}

std::vector<double> flatten_curve(const AmplitudeState& s) { return s.amplitudes; }

void write_pgm(std::ostream& out, const ImageGrid& g, std::span<const std::string> comments) {
  const int L = g.side_length();
  out << "P2\n";
  for (const auto& c : comments) out << "# " << c << "\n";
  out << L << " " << L << "\n255\n";
  for (int x = 0; x < L; ++x) {
    for (int y = 0; y < L; ++y) {
      if (y) out << ' ';
      out << static_cast<int>(std::lround(g.at(x, y) * 255.0));
    }
    out << "\n";
  }
}

void write_csv(std::ostream& out, const ImageGrid& g) {
  const int L = g.side_length();
  out << std::setprecision(17);
  for (int x = 0; x < L; ++x) {
    for (int y = 0; y < L; ++y) {
      if (y) out << ',';
      out << g.at(x, y);
    }
    out << "\n";
  }
}

}  // namespace tnload
