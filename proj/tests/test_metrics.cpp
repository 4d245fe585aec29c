#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "suno/metrics.hpp"
#include "suno/rng.hpp"

using namespace suno;

TEST_CASE("central crop follows the centering convention") {
  SplitMix64 rng(3);
  const CxArray img = oracles::random_image(rng, 4, 4);

  SUBCASE("full-size crop is the identity") {
    CHECK(((central_crop(img, 4, 4) - img).abs() == 0.0).all());
  }

  SUBCASE("4x4 image cropped to 2x2 keeps rows and cols 1..2") {
    const CxArray c = central_crop(img, 2, 2);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) CHECK(c(i, j) == img(i + 1, j + 1));
  }

  SUBCASE("cropping twice equals cropping once") {
    const CxArray once = central_crop(img, 2, 2);
    const CxArray twice = central_crop(once, 2, 2);
    CHECK(((once - twice).abs() == 0.0).all());
  }

  SUBCASE("oversized crop raises a dimension error") {
    CHECK_THROWS_AS(central_crop(img, 5, 2), DimensionError);
  }
}

TEST_CASE("default crop is 320 capped at the smaller side") {
  CHECK(default_crop(640, 368) == std::pair{320, 320});
  CHECK(default_crop(64, 64) == std::pair{64, 64});
  CHECK(default_crop(64, 48) == std::pair{48, 48});
}

TEST_CASE("nrmse identities") {
  SplitMix64 rng(8);
  const CxArray ref = oracles::random_image(rng, 6, 6);
  CHECK(nrmse(ref, ref) == 0.0);
  CHECK(std::abs(nrmse(ref, CxArray(2.0 * ref)) - 1.0) < 1e-12);
  CHECK(std::abs(nrmse(ref, CxArray(CxArray::Zero(6, 6))) - 1.0) < 1e-12);
  CHECK_THROWS_AS(nrmse(CxArray(CxArray::Zero(6, 6)), ref), UndefinedMetricError);
}

TEST_CASE("nrmse scale law for magnitude perturbations") {
  SplitMix64 rng(18);
  RealArray base(5, 5), delta(5, 5);
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j) {
      base(i, j) = 0.5 + 0.5 * rng.uniform();
      delta(i, j) = 0.1 * rng.uniform();
    }
  const CxArray ref = base.cast<Complex>();
  const CxArray est = (base + delta).cast<Complex>();
  const double expect =
      std::sqrt(delta.square().sum()) / std::sqrt(base.square().sum());
  CHECK(std::abs(nrmse(ref, est) - expect) < 1e-12);
}

TEST_CASE("nrmse grows with the noise level on average") {
  SplitMix64 rng(88);
  double mean_lo = 0.0, mean_hi = 0.0;
  const int trials = 25;
  for (int t = 0; t < trials; ++t) {
    RealArray base = RealArray::Constant(8, 8, 1.0);
    CxArray noisy_lo(8, 8), noisy_hi(8, 8);
    for (int i = 0; i < 8; ++i)
      for (int j = 0; j < 8; ++j) {
        double g0, g1;
        rng.gaussian_pair(g0, g1);
        noisy_lo(i, j) = base(i, j) + 0.01 * g0;
        noisy_hi(i, j) = base(i, j) + 0.05 * g1;
      }
    const CxArray ref = base.cast<Complex>();
    mean_lo += nrmse(ref, noisy_lo);
    mean_hi += nrmse(ref, noisy_hi);
  }
  CHECK(mean_lo / trials < mean_hi / trials);
}

TEST_CASE("psnr identities and oracle agreement") {
  SplitMix64 rng(4);
  const CxArray ref = oracles::random_image(rng, 8, 8);

  CHECK(std::isinf(psnr(ref, ref)));

  // |ref| peak 1 and RMSE exactly 0.1 gives 20 dB.
  const CxArray ones = CxArray::Constant(8, 8, 1.0);
  const CxArray est = CxArray::Constant(8, 8, 0.9);
  CHECK(std::abs(psnr(ones, est) - 20.0) < 1e-12);

  CHECK_THROWS_AS(psnr(CxArray(CxArray::Zero(4, 4)), CxArray(CxArray::Zero(4, 4))),
                  UndefinedMetricError);

  for (int t = 0; t < 20; ++t) {
    const CxArray a = oracles::random_image(rng, 9, 7);
    const CxArray b = oracles::random_image(rng, 9, 7);
    CHECK(std::abs(psnr(a, b) - oracles::psnr_naive(a, b)) < 1e-9);
  }
}

TEST_CASE("ssim identities") {
  SplitMix64 rng(5);
  const CxArray ref = oracles::random_image(rng, 12, 12);
  CHECK(std::abs(ssim(ref, ref) - 1.0) <= 1e-9);

  // Constant images: variance terms vanish and the closed form remains.
  const CxArray a = CxArray::Constant(10, 10, 1.0);
  const CxArray b = CxArray::Constant(10, 10, 0.5);
  const double c1 = 1e-4;
  const double expect = (2.0 * 0.5 + c1) / (1.0 + 0.25 + c1);
  CHECK(std::abs(ssim(a, b) - expect) < 1e-6);

  CHECK_THROWS_AS(ssim(CxArray(CxArray::Constant(6, 6, 1.0)),
                       CxArray(CxArray::Constant(6, 6, 1.0))),
                  DimensionError);
}

TEST_CASE("ssim agrees with the naive sliding-window oracle") {
  SplitMix64 rng(91);
  for (int t = 0; t < 10; ++t) {
    const CxArray a = oracles::random_image(rng, 11, 13);
    const CxArray b = oracles::random_image(rng, 11, 13);
    const double peak = a.abs().maxCoeff();
    CHECK(std::abs(ssim(a, b) - oracles::ssim_naive(a, b, peak)) < 1e-7);
  }
}

TEST_CASE("fixed-peak ssim is symmetric; ref-peak ssim is not") {
  SplitMix64 rng(6);
  const CxArray a = oracles::random_image(rng, 10, 10);
  const CxArray b = oracles::random_image(rng, 10, 10);
  CHECK(std::abs(ssim_with_peak(a, b, 1.5) - ssim_with_peak(b, a, 1.5)) < 1e-12);
}

TEST_CASE("evaluate reports all three metrics on the crop") {
  SplitMix64 rng(7);
  const CxArray ref = oracles::random_image(rng, 16, 16);
  const MetricReport r = evaluate(ref, ref, 12, 12);
  CHECK(r.nrmse == 0.0);
  CHECK(std::abs(r.ssim - 1.0) <= 1e-9);
  CHECK(std::isinf(r.psnr_db));
  CHECK(r.crop_h == 12);
  CHECK(r.crop_w == 12);
}
