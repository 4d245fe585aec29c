#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oracles.hpp"
#include "suno/fft.hpp"
#include "suno/rng.hpp"

using namespace suno;

namespace {
double rel_err(const CxArray &a, const CxArray &b) {
  return std::sqrt((a - b).abs2().sum()) / std::sqrt(b.abs2().sum());
}
} // namespace

TEST_CASE("fft2c matches the direct centered DFT") {
  SplitMix64 rng(7);
  for (auto [h, w] : {std::pair{8, 8}, {8, 12}, {9, 7}, {16, 6}}) {
    const CxArray x = oracles::random_image(rng, h, w);
    CHECK(rel_err(fft::fft2c(x), oracles::dft2c(x, false)) < 1e-12);
    CHECK(rel_err(fft::ifft2c(x), oracles::dft2c(x, true)) < 1e-12);
  }
}

TEST_CASE("fft2c is unitary and inverted by ifft2c") {
  SplitMix64 rng(21);
  const CxArray x = oracles::random_image(rng, 16, 12);
  const CxArray y = fft::fft2c(x);
  CHECK(std::abs(std::sqrt(y.abs2().sum()) - std::sqrt(x.abs2().sum())) <
        1e-6 * std::sqrt(x.abs2().sum()));
  CHECK(rel_err(fft::ifft2c(y), x) < 1e-12);
}

TEST_CASE("constant image concentrates at the DC bin") {
  const CxArray x = CxArray::Constant(4, 4, 1.0);
  const CxArray y = fft::fft2c(x);
  CHECK(std::abs(y(2, 2) - Complex(4.0, 0.0)) < 1e-12);
  double off_dc = 0.0;
  for (Eigen::Index i = 0; i < 4; ++i)
    for (Eigen::Index j = 0; j < 4; ++j)
      if (i != 2 || j != 2) off_dc += std::abs(y(i, j));
  CHECK(off_dc < 1e-12);
}

TEST_CASE("width-axis transform composes into the full 2D transform") {
  SplitMix64 rng(4);
  const CxArray x = oracles::random_image(rng, 10, 14);
  // fft2c = fft over columns-axis then width transform, in either order;
  // check the decomposition used by the masked normal operator.
  const CxArray via_width = fft::fft_width_c(x);
  const CxArray back = fft::ifft_width_c(via_width);
  CHECK(rel_err(back, x) < 1e-12);

  // Zeroing whole columns commutes with the height-axis transform.
  const Eigen::Index kill = 3;
  CxArray full = fft::fft2c(x);
  full.col(kill).setZero();
  const CxArray lhs = fft::ifft2c(full);

  CxArray widthed = fft::fft_width_c(x);
  widthed.col(kill).setZero();
  const CxArray rhs = fft::ifft_width_c(widthed);
  CHECK(rel_err(lhs, rhs) < 1e-12);
}

TEST_CASE("shifts are inverse permutations, odd sizes included") {
  SplitMix64 rng(11);
  for (auto [h, w] : {std::pair{6, 6}, {7, 5}, {8, 9}}) {
    const CxArray x = oracles::random_image(rng, h, w);
    CHECK(((fft::ifftshift2(fft::fftshift2(x)) - x).abs() == 0.0).all());
    CHECK(((fft::fftshift2(fft::ifftshift2(x)) - x).abs() == 0.0).all());
  }
}
