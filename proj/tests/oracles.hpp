#pragma once

// Test-only reference implementations, kept independent of the library's
// computation paths on purpose: direct DFT sums, scalar metric loops, and
// dense operator materialization.

#include <cmath>
#include <complex>
#include <vector>

#include "suno/mri.hpp"
#include "suno/recon.hpp"
#include "suno/rng.hpp"
#include "suno/types.hpp"

namespace oracles {

using suno::Complex;
using suno::CxArray;

// Unitary centered 2D DFT by direct O(N^2) summation. Centered layout:
// spatial index n carries coordinate n - floor(N/2), frequency index k
// carries k - floor(K/2).
inline CxArray dft2c(const CxArray &x, bool inverse) {
  const Eigen::Index h = x.rows(), w = x.cols();
  const double sgn = inverse ? 1.0 : -1.0;
  CxArray out(h, w);
  for (Eigen::Index ki = 0; ki < h; ++ki) {
    for (Eigen::Index kj = 0; kj < w; ++kj) {
      Complex acc = 0.0;
      for (Eigen::Index i = 0; i < h; ++i) {
        for (Eigen::Index j = 0; j < w; ++j) {
          const double arg =
              2.0 * M_PI *
              (static_cast<double>((ki - h / 2) * (i - h / 2)) / static_cast<double>(h) +
               static_cast<double>((kj - w / 2) * (j - w / 2)) / static_cast<double>(w));
          acc += x(i, j) * std::polar(1.0, sgn * arg);
        }
      }
      out(ki, kj) = acc / std::sqrt(static_cast<double>(h * w));
    }
  }
  return out;
}

// Complex inner product sum conj(a_i) b_i by direct scalar summation.
inline Complex inner(const CxArray &a, const CxArray &b) {
  Complex acc = 0.0;
  for (Eigen::Index j = 0; j < a.cols(); ++j)
    for (Eigen::Index i = 0; i < a.rows(); ++i) acc += std::conj(a(i, j)) * b(i, j);
  return acc;
}

inline Complex inner(const suno::MultiCoilKSpace &a, const suno::MultiCoilKSpace &b) {
  Complex acc = 0.0;
  for (std::size_t c = 0; c < a.coils.size(); ++c) acc += inner(a.coils[c], b.coils[c]);
  return acc;
}

inline double norm(const CxArray &a) { return std::sqrt(inner(a, a).real()); }

inline double norm(const suno::MultiCoilKSpace &a) {
  double acc = 0.0;
  for (const auto &c : a.coils) acc += inner(c, c).real();
  return std::sqrt(acc);
}

inline CxArray random_image(suno::SplitMix64 &rng, Eigen::Index h, Eigen::Index w) {
  CxArray x(h, w);
  for (Eigen::Index j = 0; j < w; ++j)
    for (Eigen::Index i = 0; i < h; ++i) x(i, j) = Complex(rng.uniform_pm1(), rng.uniform_pm1());
  return x;
}

inline suno::MultiCoilKSpace random_kspace(suno::SplitMix64 &rng, int ncoils, Eigen::Index h,
                                           Eigen::Index w) {
  suno::MultiCoilKSpace y;
  for (int c = 0; c < ncoils; ++c) y.coils.push_back(random_image(rng, h, w));
  return y;
}

inline suno::SensitivityMaps random_smaps(suno::SplitMix64 &rng, int ncoils, Eigen::Index h,
                                          Eigen::Index w) {
  suno::SensitivityMaps s;
  for (int c = 0; c < ncoils; ++c) s.coils.push_back(random_image(rng, h, w));
  return s;
}

// Naive scalar PSNR on magnitudes.
inline double psnr_naive(const CxArray &ref, const CxArray &est) {
  double peak = 0.0, sq = 0.0;
  for (Eigen::Index j = 0; j < ref.cols(); ++j)
    for (Eigen::Index i = 0; i < ref.rows(); ++i) {
      const double r = std::abs(ref(i, j));
      peak = std::max(peak, r);
      const double d = std::abs(est(i, j)) - r;
      sq += d * d;
    }
  const double rmse = std::sqrt(sq / static_cast<double>(ref.size()));
  return 20.0 * std::log10(peak / rmse);
}

// Naive sliding-window SSIM: per window, recompute all moments from
// scratch with plain loops. Uniform 7x7 window, Wang-2004 constants.
inline double ssim_naive(const CxArray &ref, const CxArray &est, double peak) {
  const int win = 7;
  const double c1 = (0.01 * peak) * (0.01 * peak);
  const double c2 = (0.03 * peak) * (0.03 * peak);
  const Eigen::Index oh = ref.rows() - win + 1, ow = ref.cols() - win + 1;
  double total = 0.0;
  for (Eigen::Index i = 0; i < oh; ++i) {
    for (Eigen::Index j = 0; j < ow; ++j) {
      double mx = 0, my = 0;
      for (int a = 0; a < win; ++a)
        for (int b = 0; b < win; ++b) {
          mx += std::abs(ref(i + a, j + b));
          my += std::abs(est(i + a, j + b));
        }
      mx /= win * win;
      my /= win * win;
      double vx = 0, vy = 0, vxy = 0;
      for (int a = 0; a < win; ++a)
        for (int b = 0; b < win; ++b) {
          const double dx = std::abs(ref(i + a, j + b)) - mx;
          const double dy = std::abs(est(i + a, j + b)) - my;
          vx += dx * dx;
          vy += dy * dy;
          vxy += dx * dy;
        }
      vx /= win * win;
      vy /= win * win;
      vxy /= win * win;
      total += ((2 * mx * my + c1) * (2 * vxy + c2)) /
               ((mx * mx + my * my + c1) * (vx + vy + c2));
    }
  }
  return total / static_cast<double>(oh * ow);
}

// Materializes (A^H M A + lambda I) column by column through the public
// forward/mask/adjoint composition and solves the normal equations densely.
inline CxArray dense_normal_solve(const suno::MultiCoilKSpace &y_masked,
                                  const suno::CartesianMask &m, const suno::SensitivityMaps &s,
                                  double lambda) {
  const Eigen::Index h = s.rows(), w = s.cols();
  const Eigen::Index n = h * w;
  Eigen::MatrixXcd op(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    CxArray e = CxArray::Zero(h, w);
    e(k % h, k / h) = 1.0; // column-major vectorization
    const CxArray col =
        suno::adjoint(suno::apply_mask(suno::forward(e, s), m), s) + lambda * e;
    op.col(k) = Eigen::Map<const Eigen::VectorXcd>(col.data(), n);
  }
  const CxArray b = suno::adjoint(suno::apply_mask(y_masked, m), s);
  const Eigen::VectorXcd rhs = Eigen::Map<const Eigen::VectorXcd>(b.data(), n);
  const Eigen::VectorXcd sol = op.partialPivLu().solve(rhs);
  CxArray out(h, w);
  Eigen::Map<Eigen::VectorXcd>(out.data(), n) = sol;
  return out;
}

} // namespace oracles
