#include <gtest/gtest.h>

#include <random>
#include <set>
#include <sstream>

#include "oracles.hpp"
#include "tnload/image_codec.hpp"

namespace tnload {
namespace {

ImageGrid ramp4() {
  std::vector<double> p;
  for (int x = 0; x < 4; ++x)
    for (int y = 0; y < 4; ++y) p.push_back((x + y) / 6.0);
  return ImageGrid(4, p);
}

ImageGrid random_grid(int L, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> p(static_cast<std::size_t>(L) * L);
  for (auto& v : p) v = u(rng);
  return ImageGrid(L, p);
}

TEST(LoadImage, AsciiPgmMaxIntensityMapsToOne) {
  std::istringstream in("P2\n2 2\n255\n255 255 255 255\n");
  const auto g = load_image(in, ImageFormat::Pgm);
  EXPECT_EQ(g, ImageGrid::filled(2, 1.0));
}

TEST(LoadImage, PgmCommentsAreSkipped) {
  std::istringstream in("P2\n# made by hand\n2 # width\n2\n255\n0 51 102 255\n");
  const auto g = load_image(in, ImageFormat::Pgm);
  EXPECT_DOUBLE_EQ(g.at(0, 1), 0.2);
  EXPECT_DOUBLE_EQ(g.at(1, 0), 0.4);
}

TEST(LoadImage, CsvPassesThrough) {
  std::istringstream in("0.5,0.5\n0.5,0.5\n");
  EXPECT_EQ(load_image(in, ImageFormat::Csv), ImageGrid::filled(2, 0.5));
}

TEST(LoadImage, BinaryPgmRescalesLinearly) {
  std::string bytes = "P5\n2 2\n255\n";
  bytes.push_back(static_cast<char>(0));
  bytes.push_back(static_cast<char>(128));
  bytes.push_back(static_cast<char>(255));
  bytes.push_back(static_cast<char>(0));
  std::istringstream in(bytes);
  const auto g = load_image(in, ImageFormat::Pgm);
  EXPECT_EQ(g.at(0, 0), 0.0);
  EXPECT_EQ(g.at(0, 1), 128.0 / 255.0);
  EXPECT_EQ(g.at(1, 0), 1.0);
  EXPECT_EQ(g.at(1, 1), 0.0);
}

TEST(LoadImage, Errors) {
  {
    std::istringstream in("P3\n2 2\n255\n");
    EXPECT_THROW(load_image(in, ImageFormat::Pgm), FormatError);
  }
  {
    std::istringstream in("P2\n2 x\n255\n");
    EXPECT_THROW(load_image(in, ImageFormat::Pgm), FormatError);
  }
  {
    std::istringstream in("P2\n2 2\n255\n1 2 3\n");
    EXPECT_THROW(load_image(in, ImageFormat::Pgm), FormatError);
  }
  {
    std::istringstream in("P2\n4 2\n255\n0 0 0 0 0 0 0 0\n");
    EXPECT_THROW(load_image(in, ImageFormat::Pgm), ValidationError);
  }
  {
    std::istringstream in("P2\n3 3\n255\n0 0 0 0 0 0 0 0 0\n");
    try {
      load_image(in, ImageFormat::Pgm);
      FAIL();
    } catch (const ValidationError& e) {
      EXPECT_NE(std::string(e.what()).find("downscale"), std::string::npos);
    }
  }
  {
    std::istringstream in("P2\n2 2\n65535\n0 0 0 0\n");
    EXPECT_THROW(load_image(in, ImageFormat::Pgm), FormatError);
  }
  {
    std::istringstream in("0.5,0.5\n0.5\n");
    EXPECT_THROW(load_image(in, ImageFormat::Csv), FormatError);
  }
  {
    std::istringstream in("0.5,abc\n0.5,0.5\n");
    EXPECT_THROW(load_image(in, ImageFormat::Csv), FormatError);
  }
  {
    std::istringstream in("1.5,0.5\n0.5,0.5\n");
    EXPECT_THROW(load_image(in, ImageFormat::Csv), ValidationError);
  }
}

TEST(Downscale, ConstantAndBlockMean) {
  EXPECT_EQ(downscale(ImageGrid::filled(4, 0.8), 2), ImageGrid::filled(2, 0.8));
  const auto one = downscale(ImageGrid(2, {1, 0, 0, 1}), 1);
  EXPECT_EQ(one.side_length(), 1);
  EXPECT_DOUBLE_EQ(one.at(0, 0), 0.5);
}

TEST(Downscale, MatchesNaiveBlockAverage) {
  std::mt19937_64 rng(21);
  const auto g = random_grid(64, rng);
  const auto d = downscale(g, 8);
  for (int x = 0; x < 8; ++x)
    for (int y = 0; y < 8; ++y) {
      double s = 0.0;
      for (int i = 0; i < 64; ++i)
        for (int j = 0; j < 64; ++j)
          if (i / 8 == x && j / 8 == y) s += g.at(i, j);
      EXPECT_NEAR(d.at(x, y), s / 64.0, 1e-15);
    }
}

TEST(Downscale, PreservesGlobalMean) {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 10; ++trial) {
    const auto g = random_grid(32, rng);
    for (int t : {1, 2, 8, 16}) {
      const auto d = downscale(g, t);
      EXPECT_NEAR(d.total_intensity() / (t * t), g.total_intensity() / (32 * 32), 1e-14);
    }
  }
}

TEST(Downscale, Errors) {
  const auto g = ImageGrid::filled(8, 0.1);
  EXPECT_THROW(downscale(g, 16), ValidationError);
  EXPECT_THROW(downscale(g, 3), ValidationError);
  EXPECT_THROW(downscale(g, 0), ValidationError);
}

TEST(PixelIndex, Examples) {
  for (auto o : {BitOrdering::InterleavedStraight, BitOrdering::InterleavedSnake})
    for (int L : {2, 4, 256}) EXPECT_EQ(pixel_to_basis_index(0, 0, L, o), 0u);
  EXPECT_EQ(pixel_to_basis_index(2, 1, 4, BitOrdering::InterleavedStraight), 9u);
  // Snake swaps the second rung: x=2 (10), y=1 (01) -> x1 y1 y2 x2 = 1 0 1 0.
  EXPECT_EQ(pixel_to_basis_index(2, 1, 4, BitOrdering::InterleavedSnake), 10u);
  EXPECT_THROW(pixel_to_basis_index(4, 0, 4, BitOrdering::InterleavedStraight), ValidationError);
  EXPECT_THROW(pixel_to_basis_index(0, -1, 4, BitOrdering::InterleavedStraight), ValidationError);
}

TEST(PixelIndex, BijectionForEverySideAndOrdering) {
  for (auto o : {BitOrdering::InterleavedStraight, BitOrdering::InterleavedSnake}) {
    for (int L = 2; L <= 256; L *= 2) {
      std::vector<bool> hit(static_cast<std::size_t>(L) * L, false);
      for (int x = 0; x < L; ++x)
        for (int y = 0; y < L; ++y) {
          const auto idx = pixel_to_basis_index(x, y, L, o);
          ASSERT_LT(idx, hit.size());
          ASSERT_FALSE(hit[idx]);
          hit[idx] = true;
          const auto [bx, by] = basis_index_to_pixel(idx, L, o);
          ASSERT_EQ(bx, x);
          ASSERT_EQ(by, y);
        }
    }
  }
}

TEST(Encode, UniformAndDelta) {
  const auto u = encode_amplitudes(ImageGrid::filled(2, 1.0), BitOrdering::InterleavedStraight);
  EXPECT_EQ(u.n_qubits, 2);
  for (double a : u.amplitudes) EXPECT_DOUBLE_EQ(a, 0.5);
  const auto d = encode_amplitudes(ImageGrid(2, {1, 0, 0, 0}), BitOrdering::InterleavedStraight);
  EXPECT_EQ(d.amplitudes, (std::vector<double>{1, 0, 0, 0}));
}

TEST(Encode, RampMatchesDirectFormula) {
  const auto s = encode_amplitudes(ramp4(), BitOrdering::InterleavedStraight);
  const auto oracle = testing::encode_oracle(ramp4());
  ASSERT_EQ(s.amplitudes.size(), oracle.size());
  for (std::size_t i = 0; i < oracle.size(); ++i) EXPECT_NEAR(s.amplitudes[i], oracle[i], 1e-15);
}

TEST(Encode, UnitNormOnRandomGrids) {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 50; ++trial) {
    const auto s = encode_amplitudes(random_grid(16, rng), BitOrdering::InterleavedSnake);
    double n2 = 0.0;
    for (double a : s.amplitudes) {
      EXPECT_GE(a, 0.0);
      n2 += a * a;
    }
    EXPECT_NEAR(n2, 1.0, 1e-12);
  }
}

TEST(Encode, AllZeroImageRejected) {
  EXPECT_THROW(encode_amplitudes(ImageGrid::filled(4, 0.0), BitOrdering::InterleavedStraight), ValidationError);
}

TEST(Decode, UniformAndOneHot) {
  const std::vector<double> uni(4, 0.25);
  EXPECT_EQ(decode_probabilities(uni, 2, BitOrdering::InterleavedStraight), ImageGrid::filled(2, 1.0));
  std::vector<double> hot(16, 0.0);
  hot[9] = 1.0;
  const auto g = decode_probabilities(hot, 4, BitOrdering::InterleavedStraight);
  for (int x = 0; x < 4; ++x)
    for (int y = 0; y < 4; ++y) EXPECT_EQ(g.at(x, y), (x == 2 && y == 1) ? 1.0 : 0.0);
}

TEST(Decode, RampRoundTripIsProportional) {
  const auto s = encode_amplitudes(ramp4(), BitOrdering::InterleavedStraight);
  std::vector<double> p;
  for (double a : s.amplitudes) p.push_back(a * a);
  const auto g = decode_probabilities(p, 4, BitOrdering::InterleavedStraight);
  for (int x = 0; x < 4; ++x)
    for (int y = 0; y < 4; ++y) EXPECT_NEAR(g.at(x, y), (x + y) / 6.0, 1e-14);
}

TEST(Decode, RoundTripRecoversRandomGridsUpToScale) {
  std::mt19937_64 rng(99);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const auto ordering = trial % 2 ? BitOrdering::InterleavedSnake : BitOrdering::InterleavedStraight;
    const auto g = random_grid(8, rng);
    const auto s = encode_amplitudes(g, ordering);
    std::vector<double> p;
    for (double a : s.amplitudes) p.push_back(a * a);
    const auto back = decode_probabilities(p, 8, ordering);
    double peak = 0.0;
    for (double v : g.pixels()) peak = std::max(peak, v);
    for (int x = 0; x < 8; ++x)
      for (int y = 0; y < 8; ++y) {
        const double want = g.at(x, y) / peak;
        if (want > 0.0) worst = std::max(worst, std::abs(back.at(x, y) - want) / want);
      }
  }
  EXPECT_LE(worst, 1e-9);
}

TEST(Decode, Errors) {
  EXPECT_THROW(decode_probabilities(std::vector<double>(3, 1.0 / 3), 2, BitOrdering::InterleavedStraight),
               ValidationError);
  EXPECT_THROW(decode_probabilities(std::vector<double>{0.5, 0.6, -0.1, 0.0}, 2, BitOrdering::InterleavedStraight),
               ValidationError);
  EXPECT_THROW(decode_probabilities(std::vector<double>{0.5, 0.6, 0.0, 0.0}, 2, BitOrdering::InterleavedStraight),
               ValidationError);
  // Tiny negative rounding noise is tolerated.
  EXPECT_NO_THROW(decode_probabilities(std::vector<double>{0.5, 0.5, -1e-13, 0.0}, 2, BitOrdering::InterleavedStraight));
}

TEST(Flatten, GridAndState) {
  EXPECT_EQ(flatten_curve(ImageGrid::filled(2, 0.5), BitOrdering::InterleavedStraight),
            (std::vector<double>{0.5, 0.5, 0.5, 0.5}));
  const auto delta = flatten_curve(ImageGrid(2, {0, 0, 1, 0}), BitOrdering::InterleavedStraight);
  EXPECT_EQ(std::count_if(delta.begin(), delta.end(), [](double v) { return v != 0.0; }), 1);
  const auto s = encode_amplitudes(ramp4(), BitOrdering::InterleavedStraight);
  const auto curve = flatten_curve(s);
  const auto oracle = testing::encode_oracle(ramp4());
  for (std::size_t i = 0; i < curve.size(); ++i) EXPECT_NEAR(curve[i], oracle[i], 1e-15);
  // Grid curve read in index order is the ramp re-indexed.
  const auto gc = flatten_curve(ramp4(), BitOrdering::InterleavedStraight);
  EXPECT_DOUBLE_EQ(gc[9], 3.0 / 6.0);
}

TEST(WritePgm, RoundTripsThroughLoader) {
  const ImageGrid g(2, {0.0, 1.0, 0.2, 0.6});
  std::stringstream ss;
  const std::vector<std::string> comments{"tool=test"};
  write_pgm(ss, g, comments);
  const auto back = load_image(ss, ImageFormat::Pgm);
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y) EXPECT_NEAR(back.at(x, y), g.at(x, y), 0.5 / 255);
}

}  // namespace
}  // namespace tnload
