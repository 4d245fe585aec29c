#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "suno/mri.hpp"
#include "suno/recon.hpp"

namespace suno {

enum class SamplerLoss { nrmse, one_minus_ssim };

struct SamplerConfig {
  int budget = 0;       // B
  int fixed_center = 0; // c, the centrally fixed lines
  int n_iter = 1;
  SamplerLoss loss = SamplerLoss::nrmse;
  std::uint64_t rng_seed = 0;

  void validate(int n_y) const;
};

// recon_calls counts candidate-evaluation reconstructions: the closed form
// is n_iter * m * (n_y - B) for ICD (the incumbent's loss is cached, never
// re-evaluated) and sum_j (n_y - c - j) for greedy.
struct OptTrace {
  std::vector<double> loss_history; // one entry per line move / greedy step
  long recon_calls = 0;
  std::vector<std::pair<int, int>> moved_lines; // (from, to); greedy adds use from = -1
  double final_loss = 0.0;
};

// Reconstruction loss of one mask: reconstruct, central-crop, compare
// magnitudes against the ground truth. Counts as one reconstruction call.
double mask_loss(const ScanRecord &scan, const Reconstructor &recon, const CartesianMask &m,
                 SamplerLoss loss);

// Baseline generators (§ fixed patterns). All include the conventional
// central block when c > 0 and are deterministic given their seed.
CartesianMask mask_low_frequency(int n_y, int budget);
CartesianMask mask_equispaced(int n_y, int budget, int c_fixed);
CartesianMask mask_uniform_random(int n_y, int budget, int c_fixed, std::uint64_t seed);

// Variable-density dart throwing with acceptance weight
// (1 + |k - center| / center)^(-density_power) and a minimum gap between
// the drawn lines; the gap is the largest value at which the seeded dart
// process still places every line (binary search). chosen_gap reports it.
CartesianMask mask_vdpd_1d(int n_y, int budget, int c_fixed, std::uint64_t seed,
                           double density_power, int *chosen_gap = nullptr);

// Adds B - c lines one at a time, each the loss-argmin over all unsampled
// positions (ties to the lowest index), starting from the central block.
std::pair<CartesianMask, OptTrace> greedy_optimize(const ScanRecord &scan,
                                                   const Reconstructor &recon,
                                                   const SamplerConfig &cfg);

// Iterative coordinate descent: cycles over the movable lines of the
// current mask (ascending, fixed-center lines skipped), moving each to the
// best candidate outside the mask and the central block. The incumbent
// wins ties, so the loss never increases.
std::pair<CartesianMask, OptTrace> icd_optimize(const ScanRecord &scan,
                                                const Reconstructor &recon,
                                                const SamplerConfig &cfg,
                                                const CartesianMask &init);

// Brute force over every feasible mask; guarded to C(n_y - c, B - c) <= 1e5.
// Ties resolve to the lexicographically smallest line list.
std::pair<CartesianMask, double> exhaustive_oracle(const ScanRecord &scan,
                                                   const Reconstructor &recon,
                                                   const SamplerConfig &cfg);

} // namespace suno
