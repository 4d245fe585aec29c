#pragma once

#include <string>
#include <utility>
#include <vector>

#include "suno/types.hpp"

namespace suno {

// Per-coil complex spatial weights S_c; all coils share one shape.
struct SensitivityMaps {
  std::vector<CxArray> coils;

  int ncoils() const { return static_cast<int>(coils.size()); }
  Eigen::Index rows() const { return coils.empty() ? 0 : coils.front().rows(); }
  Eigen::Index cols() const { return coils.empty() ? 0 : coils.front().cols(); }
  void validate() const;
};

// Per-coil 2D complex frequency-domain data, centered layout.
struct MultiCoilKSpace {
  std::vector<CxArray> coils;

  int ncoils() const { return static_cast<int>(coils.size()); }
  Eigen::Index rows() const { return coils.empty() ? 0 : coils.front().rows(); }
  Eigen::Index cols() const { return coils.empty() ? 0 : coils.front().cols(); }
  void validate() const;
};

// Contiguous block of c central phase-encode indices:
// [n/2 - ceil(c/2), n/2 + floor(c/2)). Returns {lo, hi_exclusive}.
std::pair<int, int> central_block(int n_y, int c);

// Ordered set of sampled phase-encode lines with a fixed central block.
struct CartesianMask {
  int n_y = 0;
  std::vector<int> lines;        // strictly increasing, in [0, n_y)
  std::vector<int> fixed_center; // the central block, subset of lines
  int budget = 0;                // |lines|

  bool contains(int line) const;
  void validate() const;

  // Builds a mask from sampled lines plus the conventional central block of
  // c_fixed lines; throws UsageError when the block is not fully sampled.
  static CartesianMask make(int n_y, std::vector<int> lines, int c_fixed);
};

// One synthetic acquisition: ground truth image, coil maps, and the
// noisy fully sampled k-space they generated.
struct ScanRecord {
  std::string id;
  CxArray ground_truth;
  SensitivityMaps smaps;
  MultiCoilKSpace kspace_full;
  double noise_sigma = 0.0;
};

// Fully sampled measurement operator A = F S with unitary centered FFT:
// per coil, output plane = fft2c(S_c * x).
MultiCoilKSpace forward(const CxArray &x, const SensitivityMaps &s);

// Exact adjoint of forward: sum_c conj(S_c) * ifft2c(y_c).
CxArray adjoint(const MultiCoilKSpace &y, const SensitivityMaps &s);

// Keeps the sampled phase-encode columns, zeroes the rest. Idempotent.
MultiCoilKSpace apply_mask(const MultiCoilKSpace &y, const CartesianMask &m);

// adjoint(apply_mask(y, m), s) — the zero-filled reconstruction A^H M y.
CxArray zero_filled_recon(const MultiCoilKSpace &y, const CartesianMask &m,
                          const SensitivityMaps &s);

} // namespace suno
