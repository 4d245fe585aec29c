#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oracles.hpp"
#include "suno/mri.hpp"
#include "suno/rng.hpp"

using namespace suno;

namespace {

SensitivityMaps unit_maps(int h, int w) {
  SensitivityMaps s;
  s.coils.push_back(CxArray::Constant(h, w, 1.0));
  return s;
}

} // namespace

TEST_CASE("constant image transforms to a pure DC line") {
  const CxArray x = CxArray::Constant(4, 4, 1.0);
  const MultiCoilKSpace y = forward(x, unit_maps(4, 4));
  CHECK(std::abs(y.coils[0](2, 2) - Complex(4.0, 0.0)) < 1e-12);
  double off = 0.0;
  for (Eigen::Index i = 0; i < 4; ++i)
    for (Eigen::Index j = 0; j < 4; ++j)
      if (i != 2 || j != 2) off += std::abs(y.coils[0](i, j));
  CHECK(off < 1e-12);
}

TEST_CASE("forward is linear: zero in, zero out") {
  const CxArray x = CxArray::Zero(8, 8);
  const MultiCoilKSpace y = forward(x, unit_maps(8, 8));
  CHECK(oracles::norm(y) == 0.0);
}

TEST_CASE("forward norm equals the stacked coil-image norm (Parseval)") {
  SplitMix64 rng(33);
  const CxArray x = oracles::random_image(rng, 8, 8);
  const SensitivityMaps s = oracles::random_smaps(rng, 2, 8, 8);
  const MultiCoilKSpace y = forward(x, s);

  double stacked = 0.0; // direct summation over the coil images
  for (const auto &coil : s.coils) {
    const CxArray weighted = coil * x;
    stacked += oracles::inner(weighted, weighted).real();
  }
  CHECK(std::abs(oracles::norm(y) - std::sqrt(stacked)) < 1e-6 * std::sqrt(stacked));
}

TEST_CASE("single-coil unit maps make forward/adjoint a round trip") {
  SplitMix64 rng(5);
  const CxArray x = oracles::random_image(rng, 8, 8);
  const SensitivityMaps s = unit_maps(8, 8);
  const CxArray back = adjoint(forward(x, s), s);
  CHECK(std::sqrt((back - x).abs2().sum()) < 1e-6 * std::sqrt(x.abs2().sum()));
}

TEST_CASE("adjoint of zero k-space is the zero image") {
  MultiCoilKSpace y;
  y.coils.assign(2, CxArray::Zero(8, 8));
  SplitMix64 rng(6);
  const SensitivityMaps s = oracles::random_smaps(rng, 2, 8, 8);
  CHECK(adjoint(y, s).abs().maxCoeff() == 0.0);
}

TEST_CASE("adjoint passes the dot-product test on 100 random instances") {
  SplitMix64 rng(1001);
  for (int trial = 0; trial < 100; ++trial) {
    const CxArray x = oracles::random_image(rng, 8, 8);
    const SensitivityMaps s = oracles::random_smaps(rng, 3, 8, 8);
    const MultiCoilKSpace y = oracles::random_kspace(rng, 3, 8, 8);
    const Complex lhs = oracles::inner(forward(x, s), y);
    const Complex rhs = oracles::inner(x, adjoint(y, s));
    CHECK(std::abs(lhs - rhs) <= 1e-6 * oracles::norm(x) * oracles::norm(y));
  }
}

TEST_CASE("central block follows the centering convention") {
  CHECK(central_block(368, 30) == std::pair{169, 199}); // lines 169..198
  CHECK(central_block(8, 4) == std::pair{2, 6});        // lines 2..5
  CHECK(central_block(9, 3) == std::pair{2, 5});
  CHECK(central_block(8, 0) == std::pair{4, 4});
}

TEST_CASE("mask validation rejects malformed masks") {
  CHECK_THROWS_AS(CartesianMask::make(8, {1, 1, 4}, 0), UsageError);   // duplicate
  CHECK_THROWS_AS(CartesianMask::make(8, {1, 9}, 0), UsageError);      // out of range
  CHECK_THROWS_AS(CartesianMask::make(8, {0, 1}, 2), UsageError);      // center missing
  CHECK_THROWS_AS(CartesianMask::make(8, {}, 0), UsageError);          // budget 0
  const CartesianMask ok = CartesianMask::make(8, {0, 3, 4, 7}, 2);
  CHECK(ok.budget == 4);
  CHECK(ok.fixed_center == std::vector<int>{3, 4});
}

TEST_CASE("apply_mask keeps listed columns and is idempotent") {
  SplitMix64 rng(9);
  MultiCoilKSpace y = oracles::random_kspace(rng, 1, 4, 4);

  SUBCASE("full mask is the identity") {
    const CartesianMask full = CartesianMask::make(4, {0, 1, 2, 3}, 0);
    const MultiCoilKSpace out = apply_mask(y, full);
    CHECK(((out.coils[0] - y.coils[0]).abs() == 0.0).all());
  }

  SUBCASE("single line keeps exactly that column") {
    y.coils[0].setConstant(1.0);
    const CartesianMask one = CartesianMask::make(4, {2}, 0);
    const MultiCoilKSpace out = apply_mask(y, one);
    for (Eigen::Index j = 0; j < 4; ++j) {
      const double expect = j == 2 ? 1.0 : 0.0;
      for (Eigen::Index i = 0; i < 4; ++i)
        CHECK(out.coils[0](i, j) == Complex(expect, 0.0));
    }
  }

  SUBCASE("idempotent bit-exactly") {
    const CartesianMask m = CartesianMask::make(4, {1, 2}, 1);
    const MultiCoilKSpace once = apply_mask(y, m);
    const MultiCoilKSpace twice = apply_mask(once, m);
    CHECK(((once.coils[0] - twice.coils[0]).abs() == 0.0).all());
  }

  SUBCASE("width mismatch raises a dimension error") {
    const CartesianMask m = CartesianMask::make(5, {1, 2}, 0);
    CHECK_THROWS_AS(apply_mask(y, m), DimensionError);
  }
}

TEST_CASE("mask application is linear and self-adjoint") {
  SplitMix64 rng(77);
  const MultiCoilKSpace y1 = oracles::random_kspace(rng, 2, 6, 6);
  const MultiCoilKSpace y2 = oracles::random_kspace(rng, 2, 6, 6);
  const CartesianMask m = CartesianMask::make(6, {0, 2, 3, 5}, 2);
  const Complex a(0.7, -0.3), b(-1.2, 0.4);

  MultiCoilKSpace combo;
  for (int c = 0; c < 2; ++c) combo.coils.push_back(a * y1.coils[c] + b * y2.coils[c]);
  const MultiCoilKSpace lhs = apply_mask(combo, m);
  const MultiCoilKSpace m1 = apply_mask(y1, m), m2 = apply_mask(y2, m);
  for (int c = 0; c < 2; ++c)
    CHECK(((lhs.coils[c] - (a * m1.coils[c] + b * m2.coils[c])).abs() == 0.0).all());

  CHECK(oracles::inner(m1, y2) == oracles::inner(y1, m2));
}

TEST_CASE("zero-filled reconstruction composes mask and adjoint") {
  SplitMix64 rng(15);

  SUBCASE("full mask reduces to the plain adjoint") {
    const SensitivityMaps s = oracles::random_smaps(rng, 2, 8, 8);
    const MultiCoilKSpace y = oracles::random_kspace(rng, 2, 8, 8);
    std::vector<int> all(8);
    for (int i = 0; i < 8; ++i) all[static_cast<std::size_t>(i)] = i;
    const CartesianMask full = CartesianMask::make(8, all, 0);
    CHECK(((zero_filled_recon(y, full, s) - adjoint(y, s)).abs() == 0.0).all());
  }

  SUBCASE("budget-1 DC mask recovers a constant image") {
    const CxArray x = CxArray::Constant(8, 8, Complex(0.5, 0.25));
    const SensitivityMaps s = unit_maps(8, 8);
    const MultiCoilKSpace y = forward(x, s);
    const CartesianMask dc = CartesianMask::make(8, {4}, 0); // the DC bin
    const CxArray back = zero_filled_recon(y, dc, s);
    CHECK(std::sqrt((back - x).abs2().sum()) < 1e-6 * std::sqrt(x.abs2().sum()));
  }

  SUBCASE("half mask equals the explicit composition") {
    const SensitivityMaps s = oracles::random_smaps(rng, 3, 8, 8);
    const MultiCoilKSpace y = oracles::random_kspace(rng, 3, 8, 8);
    const CartesianMask half = CartesianMask::make(8, {0, 3, 4, 6}, 2);
    const CxArray direct = zero_filled_recon(y, half, s);
    const CxArray composed = adjoint(apply_mask(y, half), s);
    CHECK(((direct - composed).abs() == 0.0).all());
  }
}
