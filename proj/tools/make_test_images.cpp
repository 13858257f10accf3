// Renders the bundled test images into a directory:
//   stop_sign_256.pgm, road_scene_256.pgm, road_scene_32.pgm, road_scene_16.pgm
// Output is a pure function of the code; rerunning reproduces identical bytes.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <string>

#include "tnload/image_codec.hpp"

namespace {

using tnload::ImageGrid;
using Shader = std::function<double(double u, double v)>;  // u = column, v = row, both in [0,1)

constexpr double kPi = 3.14159265358979323846;

ImageGrid render(int side, const Shader& shade) {
  constexpr int ss = 4;
  std::vector<double> px(static_cast<std::size_t>(side) * side);
  for (int x = 0; x < side; ++x) {
    for (int y = 0; y < side; ++y) {
      double acc = 0.0;
      for (int i = 0; i < ss; ++i)
        for (int j = 0; j < ss; ++j) acc += shade((y + (j + 0.5) / ss) / side, (x + (i + 0.5) / ss) / side);
      px[static_cast<std::size_t>(x) * side + y] = std::clamp(acc / (ss * ss), 0.0, 1.0);
    }
  }
  return ImageGrid(side, std::move(px));
}

// 3x5 glyphs, row-major, top row first.
constexpr std::array<const char*, 4> kStop = {
    "111100111001111",  // S
    "111010010010010",  // T
    "111101101101111",  // O
    "111101111100100",  // P
};

bool glyph_on(const char* g, int row, int col) { return g[row * 3 + col] == '1'; }

double stop_sign(double u, double v) {
  double val = 0.88 - 0.3 * v;  // sky
  if (v > 0.86) val = 0.32 + 0.04 * std::sin(60.0 * u);  // ground
  if (std::abs(u - 0.5) < 0.022 && v > 0.55) val = 0.5;  // pole

  const double dx = std::abs(u - 0.5), dy = std::abs(v - 0.38);
  const double oct = std::max({dx, dy, (dx + dy) / std::sqrt(2.0)});
  const double r = 0.31;
  if (oct <= r) val = oct > r - 0.028 ? 0.95 : 0.3;
  if (oct <= r - 0.04) {
    // Letters across the middle band.
    const double u0 = 0.26, u1 = 0.74, v0 = 0.33, v1 = 0.43;
    if (u >= u0 && u < u1 && v >= v0 && v < v1) {
      const double cell_w = (u1 - u0) / 4.0;
      const int letter = static_cast<int>((u - u0) / cell_w);
      const double lu = (u - u0 - letter * cell_w) / cell_w;  // [0,1) within the letter cell
      const double lv = (v - v0) / (v1 - v0);
      if (lu > 0.12 && lu < 0.88) {
        const int col = std::min(2, static_cast<int>((lu - 0.12) / 0.76 * 3.0));
        const int row = std::min(4, static_cast<int>(lv * 5.0));
        if (glyph_on(kStop[static_cast<std::size_t>(letter)], row, col)) val = 0.95;
      }
    }
  }
  return val;
}

double road_scene(double u, double v) {
  const double horizon = 0.45 + 0.03 * std::sin(2.0 * kPi * u * 1.5) + 0.015 * std::sin(2.0 * kPi * u * 5.0);
  double val;
  if (v < horizon) {
    val = 0.92 - 0.35 * v;
    const double sd = std::hypot(u - 0.78, v - 0.14);
    if (sd < 0.06) val = 1.0;  // sun
    // Clouds: two soft ellipses.
    const double c1 = std::hypot((u - 0.25) / 0.12, (v - 0.12) / 0.04);
    const double c2 = std::hypot((u - 0.45) / 0.09, (v - 0.2) / 0.03);
    if (std::min(c1, c2) < 1.0) val = std::max(val, 0.97 - 0.1 * std::min(c1, c2));
  } else {
    // Grass with a deterministic stripe texture.
    val = 0.42 + 0.06 * std::sin(45.0 * u + 7.0 * v) * std::sin(35.0 * v);
  }

  const double vp = 0.46;  // vanishing row
  if (v > vp) {
    const double t = (v - vp) / (1.0 - vp);  // 0 at the horizon, 1 at the bottom
    const double half = 0.46 * t + 0.004;
    const double du = u - 0.5;
    if (std::abs(du) < half) {
      val = 0.22 + 0.05 * t;
      // Edge lines.
      if (std::abs(std::abs(du) - 0.93 * half) < 0.02 * t + 0.001) val = 0.9;
      // Centre dashes, spaced in perspective.
      const double depth = 1.0 / (t + 0.05);
      if (std::abs(du) < 0.012 * t + 0.001 && std::fmod(depth, 2.0) < 1.0) val = 0.95;
    }
  }

  // Trees along the left verge: triangular crowns on thin trunks.
  for (int k = 0; k < 4; ++k) {
    const double tu = 0.06 + 0.08 * k, base = 0.62 - 0.03 * k, h = 0.22 - 0.035 * k;
    const double rel = (base - v) / h;  // 0 at crown base, 1 at tip
    if (rel >= 0.0 && rel <= 1.0 && std::abs(u - tu) < 0.045 * (1.0 - rel) * (1.0 - 0.2 * k / 3.0)) val = 0.16;
    if (v >= base && v < base + 0.05 && std::abs(u - tu) < 0.006) val = 0.28;
  }

  // A car on the right lane.
  if (u > 0.56 && u < 0.7 && v > 0.7 && v < 0.8) {
    val = 0.62;
    if (v < 0.74 && u > 0.58 && u < 0.68) val = 0.8;  // windshield
  }
  if (v > 0.79 && v < 0.815 && ((u > 0.565 && u < 0.595) || (u > 0.665 && u < 0.695))) val = 0.05;  // wheels
  return val;
}

void write_p5(const std::filesystem::path& path, const ImageGrid& g) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string());
  const int L = g.side_length();
  out << "P5\n" << L << " " << L << "\n255\n";
  for (double p : g.pixels()) out.put(static_cast<char>(static_cast<std::uint8_t>(std::lround(p * 255.0))));
}

}  // namespace

int main(int argc, char** argv) {
  const std::filesystem::path dir = argc > 1 ? argv[1] : ".";
  std::filesystem::create_directories(dir);
  const auto stop = render(256, stop_sign);
  const auto road = render(256, road_scene);
  write_p5(dir / "stop_sign_256.pgm", stop);
  write_p5(dir / "road_scene_256.pgm", road);
  write_p5(dir / "road_scene_32.pgm", tnload::downscale(road, 32));
  write_p5(dir / "road_scene_16.pgm", tnload::downscale(road, 16));
  std::cout << "wrote 4 images to " << dir.string() << "\n";
  return 0;
}
