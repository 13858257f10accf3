#pragma once

#include <cstdint>
#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tnload/types.hpp"

namespace tnload {

/// Square grayscale image with power-of-two side. Pixel (x, y) is stored
/// row-major at x * L + y, i.e. x is the row (slow axis) and y the column.
/// Coordinates are 0-based.
class ImageGrid {
 public:
  ImageGrid(int side_length, std::vector<double> pixels);

  /// Constant-valued grid.
  static ImageGrid filled(int side_length, double value);

  int side_length() const { return side_; }
  /// log2(side_length)
  int bits_per_axis() const { return bits_; }
  double at(int x, int y) const { return pixels_[static_cast<std::size_t>(x) * side_ + y]; }
  std::span<const double> pixels() const { return pixels_; }
  double total_intensity() const;

  friend bool operator==(const ImageGrid&, const ImageGrid&) = default;

 private:
  int side_;
  int bits_;
  std::vector<double> pixels_;
};

/// Ladder traversal used to flatten the interleaved coordinate bits into a
/// qubit chain. Both schemes read rungs most significant first.
///
///  - InterleavedStraight: x1 y1 x2 y2 ... xn yn
///  - InterleavedSnake:    x1 y1 y2 x2 x3 y3 ... (even rungs visited y first)
enum class BitOrdering { InterleavedStraight, InterleavedSnake };

std::string_view to_string(BitOrdering ordering);
BitOrdering parse_ordering(std::string_view name);

/// Amplitude-encoded image: real, nonnegative, unit-norm amplitudes.
struct AmplitudeState {
  int n_qubits = 0;
  std::vector<double> amplitudes;
  BitOrdering ordering = BitOrdering::InterleavedStraight;

  Vector as_complex() const;
};

enum class ImageFormat { Pgm, Csv };

ImageGrid load_image(std::istream& source, ImageFormat format);
ImageGrid load_image_file(const std::string& path);

/// Block-mean reduction to target_L x target_L.
ImageGrid downscale(const ImageGrid& g, int target_L);

std::uint64_t pixel_to_basis_index(int x, int y, int L, BitOrdering ordering);

/// Inverse of pixel_to_basis_index; returns {x, y}.
std::pair<int, int> basis_index_to_pixel(std::uint64_t index, int L, BitOrdering ordering);

AmplitudeState encode_amplitudes(const ImageGrid& g, BitOrdering ordering);

/// Rebuild an image from a measured distribution over basis states. The result
/// is rescaled so its brightest pixel is exactly 1.
ImageGrid decode_probabilities(std::span<const double> probs, int L, BitOrdering ordering);

/// Pixel intensities listed in basis-index order.
std::vector<double> flatten_curve(const ImageGrid& g, BitOrdering ordering);
std::vector<double> flatten_curve(const AmplitudeState& s);

/// P2 (ASCII) PGM, maxval 255. Optional comment lines are written after the
/// magic number.
void write_pgm(std::ostream& out, const ImageGrid& g, std::span<const std::string> comments = {});
void write_csv(std::ostream& out, const ImageGrid& g);

}  // namespace tnload
